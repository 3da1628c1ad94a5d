//! End-to-end acceptance checks, one line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;

use cesaro_core::funcspace::{norm, Grading};
use cesaro_core::invariant::{
    beurling_construct, catalog_sweep, isometry_defect, shift_relation_check, BeurlingData, LineSymbol,
    SubspaceHandle, DEFAULT_WINDOW,
};
use cesaro_core::linalg::IterationOptions;
use cesaro_core::operators::{
    apply_c, apply_cstar, commutator_refinement, discretize, kernel_ccstar, kernel_cstarc, operator_norm,
    verify_identities, KernelSpec,
};
use cesaro_core::resolvent::{
    classify, discrete_resolvent_norm, resolve_a, resolve_c, resolvent_norm_c, resolvent_residuals, Realization,
    Region,
};
use cesaro_core::semigroup::{apply_s, difference_quotient_error, laplace_reconstruct};
use cesaro_core::spectral::{cyclicity_probe, moment_match, CircleMeasure};
use cesaro_core::suite::{probe_set, random_smooth_set, smooth_suite, DEFAULT_SEED};
use cesaro_core::transforms::{conjugation_defect, MultiplierSymbol};
use cesaro_core::{Complex64, LineGrid, Result, UnitFn, UnitScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn scheme() -> Arc<UnitScheme> {
    UnitScheme::graded(Grading::default()).expect("default grading").shared()
}

fn suite() -> Vec<UnitFn> {
    smooth_suite().into_iter().map(|(_, f)| f).collect()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn rel_gap(a: &UnitFn, b: &UnitFn, scale: f64, s: &Arc<UnitScheme>) -> Result<f64> {
    let d = a.samples_on(s)?.combine(one(), &b.samples_on(s)?, -one()).norm();
    Ok(d / scale)
}

fn norm_of_c() -> Outcome {
    let s = scheme();
    let opts = IterationOptions::default();
    let base = operator_norm(&discretize(KernelSpec::Cesaro, &s), opts)?;
    let finer = operator_norm(&discretize(KernelSpec::Cesaro, &s.deepened(4).shared()), opts)?;
    let grid = LineGrid::standard().dual();
    let sup = grid.points().chain([0.0]).map(|x| MultiplierSymbol.eval(x).norm()).fold(0.0, f64::max);
    let ok = (1.90..=2.001).contains(&base) && finer > base && (sup - 2.0).abs() <= 1e-12;
    Ok((ok, format!("‖C‖_h = {base:.6}, refined {finer:.6}, sup|m| = {sup:.15}")))
}

fn norm_of_identity_minus_c() -> Outcome {
    let s = scheme();
    let value = operator_norm(&discretize(KernelSpec::Cesaro, &s).identity_minus(), IterationOptions::default())?;
    let grid = LineGrid::standard().dual();
    let worst = grid.points().map(|x| ((one() - MultiplierSymbol.eval(x)).norm() - 1.0).abs()).fold(0.0, f64::max);
    let ok = (0.98..=1.001).contains(&value) && worst <= 1e-12;
    Ok((ok, format!("‖I−C‖_h = {value:.6}, max ||1−m|−1| = {worst:.1e}")))
}

fn adjointness() -> Outcome {
    let s = scheme();
    let fs = random_smooth_set(DEFAULT_SEED, 50);
    let gs = random_smooth_set(DEFAULT_SEED + 1, 50);
    let mut worst = 0.0f64;
    for (f, g) in fs.iter().zip(&gs) {
        let (fv, gv) = (f.samples_on(&s)?, g.samples_on(&s)?);
        let lhs = apply_c(f, &s)?.inner(&gv);
        let rhs = fv.inner(&apply_cstar(g, &s)?);
        worst = worst.max((lhs - rhs).norm() / (fv.norm() * gv.norm()));
    }
    Ok((worst <= 1e-8, format!("max relative defect over 50 pairs = {worst:.2e}")))
}

fn normality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (x, t) = (rng.gen_range(1e-6..1.0 - 1e-6), rng.gen_range(1e-6..1.0 - 1e-6));
        let (a, b) = (kernel_ccstar(x, t)?, kernel_cstarc(x, t)?);
        worst = worst.max((a - b).abs() / a.abs());
    }
    let base = UnitScheme::graded(Grading { graded_per_side: 8, interior_panels: 4, ..Default::default() })?.shared();
    let comm = commutator_refinement(&base, 3, IterationOptions::default())?;
    let ok = worst <= 1e-13 && comm.windows(2).all(|w| w[1] < w[0]);
    Ok((ok, format!("kernel mismatch {worst:.1e}, commutator norms {comm:?}")))
}

fn identities() -> Outcome {
    let r = verify_identities(&scheme(), &suite())?;
    Ok((r.max() <= 1e-6, format!("{r:?}")))
}

fn unitary_conjugation() -> Outcome {
    let s = scheme();
    let grid = LineGrid::standard();
    let mut worst = 0.0f64;
    for f in suite() {
        worst = worst.max(conjugation_defect(&f, &s, &grid)?);
    }
    Ok((worst <= 1e-6, format!("max ‖ℱΦCf − m·ℱΦf‖/‖f‖ = {worst:.2e}")))
}

fn resolvent() -> Outcome {
    let s = scheme();
    let lambdas = [
        Complex64::new(0.5, 0.0),
        Complex64::new(0.5, 0.1),
        Complex64::new(3.0, 0.0),
        Complex64::new(1.0, 2.0),
        Complex64::new(-1.0, 0.0),
    ];
    let mut residual = 0.0f64;
    let mut ratio_gap = 0.0f64;
    for l in lambdas {
        let point = classify(l);
        for f in suite() {
            residual = residual.max(resolvent_residuals(&point, &f, &s)?.max());
        }
        let realization = match point.region {
            Region::InsideDisk => Realization::Circulant(LineGrid::standard()),
            _ => Realization::Galerkin(s.clone()),
        };
        let exact = resolvent_norm_c(&point)?;
        ratio_gap = ratio_gap.max((discrete_resolvent_norm(l, &realization) / exact - 1.0).abs());
    }
    // at λ = 1 the resolvent is I − C*
    let mut branch = 0.0f64;
    let unit = classify(one());
    for f in suite() {
        let r = resolve_c(&unit, &f, &s)?;
        let cs = apply_cstar(&f, &s)?;
        let target = UnitFn::from(f.samples_on(&s)?.combine(one(), &cs, -one()));
        for p in s.points() {
            branch = branch.max((r.eval(*p) - target.eval(*p)).norm());
        }
    }
    let ok = residual <= 1e-6 && branch <= 1e-6 && ratio_gap <= 0.15;
    Ok((ok, format!("residual {residual:.2e}, λ=1 branch {branch:.2e}, norm formula gap {:.1}%", 100.0 * ratio_gap)))
}

fn semigroup() -> Outcome {
    let s = scheme();
    let (mut scaling, mut law) = (0.0f64, 0.0f64);
    let mut monotone = true;
    for f in suite() {
        let nf = norm(&f, &s)?;
        for t in [0.5, 1.0, 2.0] {
            let r = norm(&apply_s(t, &f), &s)? / nf;
            scaling = scaling.max((r - (-0.5 * t).exp()).abs());
        }
        for (a, b) in [(0.5, 1.0), (1.0, 2.0), (2.0, 0.5)] {
            law = law.max(rel_gap(&apply_s(a, &apply_s(b, &f)), &apply_s(a + b, &f), nf, &s)?);
        }
        let dist: Vec<f64> =
            [1e-1, 1e-2, 1e-3, 1e-4].iter().map(|&t| rel_gap(&apply_s(t, &f), &f, nf, &s)).collect::<Result<_>>()?;
        monotone &= dist.windows(2).all(|w| w[1] < w[0]);
    }
    let chi = UnitFn::indicator();
    let e2 = difference_quotient_error(&chi, 1e-2, &s)?;
    let e3 = difference_quotient_error(&chi, 1e-3, &s)?;
    let order = (e2 / e3).log10();
    let mut laplace = 0.0f64;
    for f in [chi, UnitFn::real(|x| x), UnitFn::real(|x| (PI * x).sin())] {
        let rec = laplace_reconstruct(&f, 40.0, 400, None)?;
        let cf = UnitFn::from(apply_c(&f, &s)?);
        laplace = laplace.max(rel_gap(&rec, &cf, 1.0, &s)?);
    }
    let ok = scaling <= 1e-7 && law <= 1e-7 && monotone && (order - 1.0).abs() < 0.1 && laplace <= 1e-5;
    Ok((
        ok,
        format!(
            "norm scaling {scaling:.1e}, law {law:.1e}, continuity monotone {monotone}, \
             difference quotient order {order:.3}, Laplace {laplace:.1e}"
        ),
    ))
}

fn generator_resolvent() -> Outcome {
    let s = scheme();
    let mut worst = 0.0f64;
    for f in suite() {
        let nf = norm(&f, &s)?;
        let c = UnitFn::from(apply_c(&f, &s)?);
        worst = worst.max(rel_gap(&resolve_a(Complex64::new(0.0, 0.0), &f, &s)?, &c, nf, &s)?);
        let cs = UnitFn::from(apply_cstar(&f, &s)?.scale(-one()));
        worst = worst.max(rel_gap(&resolve_a(-one(), &f, &s)?, &cs, nf, &s)?);
    }
    Ok((worst <= 1e-6, format!("max relative gap to C and −C* = {worst:.2e}")))
}

fn spectral_measure() -> Outcome {
    let s = scheme();
    let mass = CircleMeasure.total_mass()?;
    let table = moment_match(4, &s)?;
    let first = (table.orbit[(1, 0)].re - PI * PI / 6.0).abs();
    let second = (table.orbit[(1, 1)].re - PI * PI / 3.0).abs();
    let gap = table.max_discrepancy();
    let ok = (mass - 1.0).abs() <= 1e-8 && gap <= 1e-4 && first <= 1e-6 && second <= 1e-5;
    Ok((ok, format!("mass {mass:.12}, moment gap {gap:.2e}, ⟨Cχ,χ⟩ off by {first:.1e}, ‖Cχ‖² off by {second:.1e}")))
}

fn cyclicity() -> Outcome {
    let rep = cyclicity_probe(6, 4, &scheme())?;
    // x⁰ = χ already lies in every span, so only j ≥ 1 can decrease
    let decreasing = (1..=4).all(|j| (2..6).all(|n| rep.distances[n + 1][j] < rep.distances[n][j]));
    let row: Vec<String> = (1..=4).map(|j| format!("{:.3e}→{:.3e}", rep.distances[2][j], rep.distances[6][j])).collect();
    Ok((decreasing, format!("distances N=2→6 for j=1..4: {}", row.join(", "))))
}

fn invariance_equivalence() -> Outcome {
    let rows = catalog_sweep(&scheme(), &[0.5, 1.0, 2.0], &probe_set(DEFAULT_SEED))?;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &rows {
        let s_max = r.semigroup_defects.iter().map(|&(_, d)| d).fold(0.0, f64::max);
        let s_min = r.semigroup_defects.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
        ok &= r.verdicts_agree(1e-5) && (r.cesaro_defect <= 1e-5) == r.expected_invariant;
        if !r.expected_invariant {
            ok &= r.cesaro_defect > 1e-2 && s_max > 1e-2;
        }
        parts.push(format!("{}: C {:.1e} S {:.1e}..{:.1e}", r.name, r.cesaro_defect, s_min, s_max));
    }
    Ok((ok, parts.join("; ")))
}

fn shift_representation() -> Outcome {
    let s = scheme();
    let (mut iso, mut shift) = (0.0f64, 0.0f64);
    for t in [2f64.ln(), 1.0] {
        for f in suite() {
            iso = iso.max(isometry_defect(t, &f, DEFAULT_WINDOW, &s)?);
        }
        shift = shift.max(shift_relation_check(t, &UnitFn::real(|x| x * (1.0 - x)), DEFAULT_WINDOW)?);
    }
    Ok((iso <= 1e-8 && shift <= 1e-7, format!("isometry defect {iso:.1e}, shift relation residual {shift:.1e}")))
}

fn beurling_example() -> Outcome {
    let s = scheme();
    let q: LineSymbol = Arc::new(|x| Complex64::from_polar(1.0, -x));
    let simply = beurling_construct(BeurlingData::Simply(q), &s)?;
    let cutoff = SubspaceHandle::cutoff(1.0 / (1.0 + 1f64.exp()), &s)?;
    let mut tests = suite();
    tests.extend(probe_set(DEFAULT_SEED));
    let d = simply.projector_distance(&cutoff, &tests)?;
    Ok((d <= 1e-6, format!("projector discrepancy {d:.2e}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("norm of C", norm_of_c),
        ("norm of I - C", norm_of_identity_minus_c),
        ("adjointness", adjointness),
        ("normality", normality),
        ("algebraic identities", identities),
        ("unitary conjugation", unitary_conjugation),
        ("resolvent", resolvent),
        ("semigroup", semigroup),
        ("generator resolvent", generator_resolvent),
        ("spectral measure", spectral_measure),
        ("cyclicity", cyclicity),
        ("invariance equivalence", invariance_equivalence),
        ("shift representation", shift_representation),
        ("Beurling-Lax example", beurling_example),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(outcome) => outcome,
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!("{} {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
