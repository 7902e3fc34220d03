"""Named reproduction scenarios emitting machine-checkable report rows.

Each scenario runs a fixed list of checks and returns a Report whose
rows carry (check id, computed value, expected value, provenance,
pass flag).  The provenance tag states how the expected value is
compared:

- "golden":    exact equality with a recorded value;
- "tolerance": computed <= expected numeric budget;
- "floor":     computed >= expected numeric bound;
- "range":     expected is [lo, hi] and computed must lie inside;
- rows without an expected value are informational (pass is None).

Reports serialize deterministically: the same scenario and seed give
byte-identical JSON.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .betti import (
    BettiVector,
    NonSymplecticInvariants,
    ResolutionRecipe,
    borcea_voisin_betti,
    connected_sum_b2,
    holonomy_classification,
    kunneth_s1,
    moduli_dimension,
    open_cy_betti,
    resolve_betti,
)
from .eguchi_hanson import (
    TOLERANCES,
    curvature_injectivity_scaling_probe,
    flat_deviation,
    potential,
    ricci_ratio,
    sample_points,
    scaling_identity_probe,
)
from .errors import G2KitError, InvalidScenario
from .flow import build_mode_system, decay_trials
from .forms import PHI0
from .poincare import (
    exterior_derivative,
    poincare_primitive,
    primitive_ratio_study,
    random_exact_form,
)
from .torus import (
    AffineTorusMap,
    check_preserves_form,
    count_ends,
    cross_section_group,
    fixed_set,
    generate_group,
    involution_fixed_census,
    pull,
    quotient_betti,
    singular_locus,
)

import numpy as np

MAX_SHIFT_DENOMINATOR = 16

H = Fraction(1, 2)
D = AffineTorusMap.diagonal


def _alpha():
    return D([1, 1, 1, -1, -1, -1, -1], name="alpha")


def _beta():
    return D([1, -1, -1, 1, 1, -1, -1], [0, 0, 0, 0, 0, H, 0], name="beta")


def _gamma():
    return D([-1, 1, -1, 1, -1, 1, -1], [0, 0, 0, 0, H, 0, H], name="gamma")


def _gamma1():
    return D([-1, 1, -1, 1, -1, 1, -1], [0, 0, H, 0, H, 0, 0], name="gamma1")


def _sigma_52():
    return D([-1, 1, 1, 1, 1, -1, -1], [H, 0, 0, 0, 0, H, H], name="sigma")


def _sigma_53():
    return D([-1, -1, -1, 1, 1, 1, 1], [H, H, H, 0, 0, 0, 0], name="sigmap")


@dataclass(frozen=True)
class CheckRow:
    check: str
    computed: object
    expected: object = None
    provenance: str = "golden"
    passed: Optional[bool] = None

    def to_dict(self):
        return {"check": self.check, "computed": self.computed,
                "expected": self.expected, "provenance": self.provenance,
                "pass": self.passed}


def row(check, computed, expected=None, provenance="golden"):
    passed = None
    if expected is not None:
        if provenance == "tolerance":
            passed = bool(computed <= expected)
        elif provenance == "floor":
            passed = bool(computed >= expected)
        elif provenance == "range":
            lo, hi = expected
            passed = bool(lo <= computed <= hi)
        else:
            passed = computed == expected
    return CheckRow(check=check, computed=computed, expected=expected,
                    provenance=provenance, passed=passed)


@dataclass(frozen=True)
class Report:
    scenario: str
    rows: tuple
    seed: int
    precision: str
    tolerances: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def all_pass(self):
        return all(r.passed for r in self.rows if r.passed is not None)

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "environment": {
                "seed": self.seed,
                "precision": self.precision,
                "tolerances": dict(sorted(self.tolerances.items())),
                "version": self.version,
            },
            "rows": [r.to_dict() for r in self.rows],
            "pass": self.all_pass,
        }


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def report_to_json(reports):
    """Deterministic JSON for one report or a list of them."""
    if isinstance(reports, Report):
        payload = reports.to_dict()
    else:
        payload = [r.to_dict() for r in reports]
    return json.dumps(payload, sort_keys=True, indent=2,
                      default=_json_default) + "\n"


def _summary(strata):
    """Canonical 'count x type' summary of a stratum list."""
    tally = {}
    for s in strata:
        key = (-s.torus_dim, -s.line_dim, s.type_label)
        tally[key] = tally.get(key, 0) + 1
    return "+".join(f"{n}x{label}" for (_, _, label), n in sorted(tally.items())) \
        or "free"


def _the_group():
    return generate_group([_alpha(), _beta(), _gamma()])


def _resolved(group):
    return resolve_betti(ResolutionRecipe(base=quotient_betti(group),
                                          strata=singular_locus(group)))


def _joyce(seed, precision):
    G = _the_group()
    a, b, g = _alpha(), _beta(), _gamma()
    rows = [
        row("group_order", G.order, 8),
        row("fixed_alpha", _summary(fixed_set(a)), "16xT3"),
        row("fixed_beta", _summary(fixed_set(b)), "16xT3"),
        row("fixed_gamma", _summary(fixed_set(g)), "16xT3"),
        row("fixed_alpha_beta", _summary(fixed_set(a.compose(b))), "free"),
        row("fixed_beta_gamma", _summary(fixed_set(b.compose(g))), "free"),
        row("fixed_gamma_alpha", _summary(fixed_set(g.compose(a))), "free"),
        row("fixed_alpha_beta_gamma",
            _summary(fixed_set(a.compose(b).compose(g))), "free"),
    ]
    locus = singular_locus(G)
    rows.append(row("singular_locus", _summary(locus), "12xT3"))
    rows.append(row("singular_orbit_counts",
                    sorted(s.count for s in locus), [4] * 12))
    rows.append(row("quotient_betti", list(quotient_betti(G)),
                    [1, 0, 0, 7, 7, 0, 0, 1]))
    res = _resolved(G)
    rows.append(row("resolved_b2", res[2], 12))
    rows.append(row("resolved_b3", res[3], 43))
    rows.append(row("phi_invariance",
                    all(check_preserves_form(x, PHI0, 1) for x in G), True))
    return Report("joyce-T7-Gamma", tuple(rows), seed, precision)


def _pull_scenario(name, gens, direction, strata_summary, resolved_2_5,
                   cross_b2b3, moduli, seed, precision):
    G = generate_group(gens)
    P = pull(G, direction)
    rows = [row("group_order", P.order, 8)]
    strata = singular_locus(P)
    rows.append(row("singular_locus", _summary(strata), strata_summary))
    base = quotient_betti(P)
    res = resolve_betti(ResolutionRecipe(base=base, strata=strata))
    rows.append(row("base_betti_2_5", [base.get(k) for k in range(2, 6)],
                    None))
    rows.append(row("resolved_betti_2_5", [res[k] for k in range(2, 6)],
                    list(resolved_2_5)))
    CS = cross_section_group(P, direction)
    cres = resolve_betti(ResolutionRecipe(base=quotient_betti(CS),
                                          strata=singular_locus(CS)))
    rows.append(row("cross_section_b2_b3", [cres[2], cres[3]],
                    list(cross_b2b3)))
    rows.append(row("moduli_dimension",
                    moduli_dimension(res[4], cres[3], res[1]), moduli))
    ends = count_ends(P, direction)
    rows.append(row("ends", ends, 1))
    rows.append(row("holonomy",
                    holonomy_classification(res[1] == 0, ends, res[1] > 0),
                    "full_G2"))
    return Report(name, tuple(rows), seed, precision)


def _pull_x1(seed, precision):
    return _pull_scenario("pull-x1", [_alpha(), _beta(), _gamma()], 1,
                          "2xT3+8xT2xR", (10, 26, 17, 2), (19, 40), 36,
                          seed, precision)


def _pull_x3(seed, precision):
    return _pull_scenario("pull-x3", [_alpha(), _beta(), _gamma()], 3,
                          "4xT3+4xT2xR", (8, 24, 19, 4), (11, 24), 30,
                          seed, precision)


def _gamma1_pull_x7(seed, precision):
    return _pull_scenario("gamma1-pull-x7", [_alpha(), _beta(), _gamma1()], 7,
                          "6xT3", (6, 22, 21, 6), (3, 8), 24,
                          seed, precision)


def _pull_x5_borcea(seed, precision):
    G = generate_group([_alpha(), _beta()])
    P = pull(G, 5)
    q = quotient_betti(P)
    ends = count_ends(P, 5)
    rows = [
        row("group_order", P.order, 4),
        row("b1", q[1], 1),
        row("ends", ends, 1),
        row("holonomy",
            holonomy_classification(q[1] == 0, ends, q[1] > 0), "reducible"),
    ]
    bv = borcea_voisin_betti(NonSymplecticInvariants(10, 8))
    rows.append(row("blownup_quotient_b2_b3", list(bv), [15, 8]))
    w = open_cy_betti(bv[0], bv[1], 10)
    rows.append(row("open_piece_b2_b3_ker", list(w), [14, 20, 4]))
    s1w = kunneth_s1(BettiVector([1, 0, w[0], w[1]]))
    rows.append(row("circle_times_w_b2_b3", [s1w[2], s1w[3]], [14, 34]))
    rows.append(row("connected_sum_b2", connected_sum_b2(4, 4, 4), 12))
    return Report("pull-x5-borcea", tuple(rows), seed, precision)


def _coassoc(name, sigma_fn, census_expected, half_direction, half_expected,
             seed, precision):
    G = _the_group()
    sigma = sigma_fn()
    rows = [
        row("reverses_reference_form",
            check_preserves_form(sigma, PHI0, -1), True),
        row("census", _summary(involution_fixed_census(sigma, G)),
            census_expected),
    ]
    if half_direction is not None:
        P = pull(G, half_direction)
        lifted = AffineTorusMap(sigma.linear, sigma.shift, P.lines,
                                sigma.name)
        rows.append(row("half_census",
                        _summary(involution_fixed_census(lifted, P)),
                        half_expected))
    return Report(name, tuple(rows), seed, precision)


def _coassoc_52(seed, precision):
    return _coassoc("coassoc-5.2", _sigma_52, "1xT4+16xpoint",
                    4, "1xT3xR+8xpoint", seed, precision)


def _coassoc_53(seed, precision):
    return _coassoc("coassoc-5.3", _sigma_53, "2xT4/pm1+32xpoint",
                    None, None, seed, precision)


def _eh_suite(seed, precision, scales=(0.5, 1.0, 2.0), samples=20,
              ricci_tol=None):
    tol = dict(TOLERANCES)
    if ricci_tol is not None:
        tol["ricci"] = ricci_tol
    rows = []
    for s in scales:
        worst = max(ricci_ratio(s, z1, z2, precision=precision)
                    for z1, z2 in sample_points(samples, s, seed=seed))
        rows.append(row(f"ricci_max_ratio_s={s:g}", worst, tol["ricci"],
                        provenance="tolerance"))
    rows.append(row("flat_deviation_at_r_1000s",
                    flat_deviation(1.0, 1000.0 + 0j, 0j),
                    tol["flat_limit"], provenance="tolerance"))
    rows.append(row("potential_asymptote_rel_err",
                    abs(potential(1.0, 1e4) / 1e8 - 1), 1e-6,
                    provenance="tolerance"))
    probe = scaling_identity_probe(1.0, 2.0, sample_points(10, 1.0, seed=seed))
    rows.append(row("scaling_verdict", probe.verdict, "s/lambda"))
    margin = probe.matches_lambda_s / max(probe.matches_s_over_lambda, 1e-300)
    rows.append(row("scaling_margin", min(margin, 1e300), 1e6,
                    provenance="floor"))
    rows.append(row("scaling_dev_matching", probe.matches_s_over_lambda))
    rows.append(row("scaling_dev_other", probe.matches_lambda_s))
    crep = curvature_injectivity_scaling_probe(list(scales))
    if len(scales) >= 2:
        rows.append(row("curvature_slope", crep.slope, [-2.1, -1.9],
                        provenance="range"))
    else:
        # a slope needs at least two scales; record the peak norm instead
        rows.append(row("curvature_peak_norms",
                        [float(v) for v in crep.max_norms]))
    return Report("eh-suite", tuple(rows), seed, precision, tolerances=tol)


def _flow_suite(seed, precision):
    tol = {"integrator_rtol": 1e-9, "spectrum_match": 1e-9,
           "rate_slack_times_mu": 0.05, "ratio_drift": 0.10}
    rows = []
    sys22 = build_mode_system(2, 2)
    rows.append(row("mu", sys22.mu, 2 * math.pi))
    rows.append(row("spectrum_table_N2",
                    {str(k): v for k, v in sys22.spectrum_table().items()},
                    {"1": 4, "2": 4, "4": 4, "5": 8, "8": 4}))
    dense = np.linalg.eigvalsh(sys22.dense_operator())
    dev = float(np.max(np.abs(np.sort(sys22.spectrum()) - dense)))
    rows.append(row("blockwise_vs_dense_max_dev", dev,
                    tol["spectrum_match"], provenance="tolerance"))

    system, runs = decay_trials(d=2, N=1, k_frac=0.1, trials=20, seed=seed)
    bound = system.mu - 2 * (0.1 * system.mu) - 0.05 * system.mu
    rows.append(row("decaying_trials", sum(t.decaying for t, _ in runs), 20))
    rows.append(row("min_fitted_rate",
                    min(t.fitted_rate for t, _ in runs if t.decaying),
                    bound, provenance="floor"))
    rows.append(row("gap_monotone_all",
                    all(c.monotone for _, c in runs), True))
    rows.append(row("gap_dominance_all",
                    all(c.dominance for t, c in runs if t.decaying), True))

    exact = 0
    for i in range(100):
        w = random_exact_form(2, 2, cutoff=2, seed=seed + i)
        res = poincare_primitive(w)
        exact += exterior_derivative(res.primitive) == w
    rows.append(row("primitive_bit_exact_count", exact, 100))
    m1, _ = primitive_ratio_study(2, 2, cutoff=2, n=100, seed=seed)
    m2, _ = primitive_ratio_study(2, 2, cutoff=4, n=100, seed=seed)
    rows.append(row("primitive_ratio_drift", abs(m2 - m1) / m1,
                    tol["ratio_drift"], provenance="tolerance"))
    return Report("flow-suite", tuple(rows), seed, precision, tolerances=tol)


BUILTINS = {
    "joyce-T7-Gamma": _joyce,
    "pull-x1": _pull_x1,
    "pull-x3": _pull_x3,
    "gamma1-pull-x7": _gamma1_pull_x7,
    "pull-x5-borcea": _pull_x5_borcea,
    "coassoc-5.2": _coassoc_52,
    "coassoc-5.3": _coassoc_53,
    "eh-suite": _eh_suite,
    "flow-suite": _flow_suite,
}


def list_scenarios():
    return list(BUILTINS)


@dataclass(frozen=True)
class Scenario:
    """Validated user scenario loaded from JSON."""

    name: str
    circles: int
    generators: tuple        # (name, signs, shifts) triples
    involution: Optional[tuple]
    pull_direction: Optional[int]
    checks: tuple
    expected: dict


_KNOWN_CHECKS = ("betti", "moduli", "coassoc", "form-invariance", "eh",
                 "flow")


def _parse_map_spec(spec, circles, what):
    if not isinstance(spec, dict):
        raise InvalidScenario(f"{what} must be an object")
    signs = spec.get("signs")
    if not isinstance(signs, list) or len(signs) != circles or \
            any(s not in (1, -1) for s in signs):
        raise InvalidScenario(
            f"{what}.signs must be a list of {circles} entries +-1")
    raw_shift = spec.get("shift", ["0"] * circles)
    if not isinstance(raw_shift, list) or len(raw_shift) != circles:
        raise InvalidScenario(
            f"{what}.shift must be a list of {circles} fraction strings")
    shifts = []
    for s in raw_shift:
        try:
            frac = Fraction(str(s))
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidScenario(f"{what}.shift entry {s!r}: {e}") from None
        if frac.denominator > MAX_SHIFT_DENOMINATOR:
            raise InvalidScenario(
                f"{what}.shift entry {s} has denominator above "
                f"{MAX_SHIFT_DENOMINATOR}")
        shifts.append(frac)
    return (str(spec.get("name", what)), tuple(signs), tuple(shifts))


def load_scenario(path):
    """Parse and validate a scenario JSON file."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise InvalidScenario(f"cannot read scenario: {e}") from None
    except json.JSONDecodeError as e:
        raise InvalidScenario(f"scenario is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise InvalidScenario("scenario must be a JSON object")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise InvalidScenario("scenario needs a nonempty string name")
    circles = data.get("circles", 7)
    if not isinstance(circles, int) or not 1 <= circles <= 8:
        raise InvalidScenario("circles must be an integer in 1..8")
    gens_raw = data.get("generators", [])
    if not isinstance(gens_raw, list) or not gens_raw:
        raise InvalidScenario("scenario needs a nonempty generators list")
    gens = tuple(_parse_map_spec(g, circles, f"generators[{i}]")
                 for i, g in enumerate(gens_raw))
    involution = None
    if "involution" in data:
        involution = _parse_map_spec(data["involution"], circles,
                                     "involution")
    pull_direction = data.get("pull")
    if pull_direction is not None and \
            (not isinstance(pull_direction, int)
             or not 1 <= pull_direction <= circles):
        raise InvalidScenario(f"pull must be a coordinate in 1..{circles}")
    checks = data.get("checks", ["betti"])
    if not isinstance(checks, list) or not checks or \
            any(c not in _KNOWN_CHECKS for c in checks):
        raise InvalidScenario(
            f"checks must be a nonempty subset of {_KNOWN_CHECKS}")
    if "coassoc" in checks and involution is None:
        raise InvalidScenario("coassoc check needs an involution")
    if "moduli" in checks and pull_direction is None:
        raise InvalidScenario("moduli check needs a pull direction")
    expected = data.get("expected", {})
    if not isinstance(expected, dict):
        raise InvalidScenario("expected must be an object")
    return Scenario(name=name, circles=circles, generators=gens,
                    involution=involution, pull_direction=pull_direction,
                    checks=tuple(checks), expected=dict(expected))


def _build_map(spec, lines=()):
    name, signs, shifts = spec
    return AffineTorusMap.diagonal(signs, shifts, lines, name)


def run_scenario_object(sc, seed=0, precision="double"):
    """Execute a validated user scenario."""
    exp = sc.expected
    try:
        group = generate_group([_build_map(g) for g in sc.generators])
        pulled = pull(group, sc.pull_direction) if sc.pull_direction else None
    except G2KitError as e:
        raise InvalidScenario(f"scenario construction failed: {e}") from None
    active = pulled if pulled is not None else group

    rows = []
    for check in sc.checks:
        if check == "betti":
            rows.append(row("group_order", active.order,
                            exp.get("group_order")))
            rows.append(row("singular_locus", _summary(singular_locus(active)),
                            exp.get("singular_locus")))
            q = quotient_betti(active)
            rows.append(row("quotient_betti", list(q),
                            exp.get("quotient_betti")))
            res = resolve_betti(ResolutionRecipe(
                base=q, strata=singular_locus(active)))
            rows.append(row("resolved_betti", list(res),
                            exp.get("resolved_betti")))
        elif check == "form-invariance":
            if sc.circles != 7:
                raise InvalidScenario(
                    "form-invariance needs a 7-dimensional torus")
            ok = all(check_preserves_form(_build_map(g), PHI0, 1)
                     for g in sc.generators)
            rows.append(row("phi_invariance", ok, True))
        elif check == "coassoc":
            # the census always concerns the compact quotient; a pull
            # direction changes the betti and moduli rows only
            sigma = _build_map(sc.involution)
            rows.append(row("reverses_reference_form",
                            check_preserves_form(sigma, PHI0, -1), True))
            rows.append(row("census",
                            _summary(involution_fixed_census(sigma, group)),
                            exp.get("census")))
        elif check == "moduli":
            res = resolve_betti(ResolutionRecipe(
                base=quotient_betti(active), strata=singular_locus(active)))
            CS = cross_section_group(active, sc.pull_direction)
            cres = resolve_betti(ResolutionRecipe(
                base=quotient_betti(CS), strata=singular_locus(CS)))
            rows.append(row("cross_section_b2_b3", [cres[2], cres[3]],
                            exp.get("cross_section_b2_b3")))
            rows.append(row("moduli_dimension",
                            moduli_dimension(res[4], cres[3], res[1]),
                            exp.get("moduli_dimension")))
        elif check == "eh":
            rows.extend(_eh_suite(seed, precision).rows)
        elif check == "flow":
            rows.extend(_flow_suite(seed, precision).rows)
    return Report(sc.name, tuple(rows), seed, precision)


def run_scenario(name_or_path, seed=0, precision="double"):
    """Run a builtin scenario by name, or a scenario JSON file by path."""
    if precision not in ("double", "extended"):
        raise InvalidScenario(f"unknown precision {precision!r}")
    if name_or_path in BUILTINS:
        return BUILTINS[name_or_path](seed, precision)
    p = Path(name_or_path)
    if p.suffix == ".json" or p.exists():
        return run_scenario_object(load_scenario(p), seed, precision)
    raise InvalidScenario(
        f"unknown scenario {name_or_path!r}; builtins: "
        + ", ".join(BUILTINS))
