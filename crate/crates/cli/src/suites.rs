use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubegeom::algebras;
use tubegeom::complexify::{
    coset_leaf_map, cr_residual, leaf_map, phi_inverse, phi_map, psi_map, CosetChart, TangentPoint,
};
use tubegeom::curvature::CurvatureTensor;
use tubegeom::jet::RealJet;
use tubegeom::kahler::{
    curvature_table, k_components_at_zero, k_oracle_from_jet, negative_plane_flag,
    plane_from_components, sectional_plane, table_to_csv, Plane,
};
use tubegeom::lie::{
    group_exp, group_log, project_h, project_m, random_algebra_element, random_group_element,
    random_m_element, AlgebraElement, GroupElement, LieAlgebraContext,
};
use tubegeom::linalg::{dist, CMat, C64};
use tubegeom::ma::{
    curvature_rearrangement_sum, ma_residual, ordered_quadruples, potential_expansion,
    series_solve_quartic, PointwiseResidual,
};
use tubegeom::nahm::*;

use crate::config::SuiteConfig;
use crate::error::{CliError, CliResult};
use crate::report::ReportRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    MaExpansion,
    KahlerCurvature,
    ComplexifyHolomorphy,
    NahmGauge,
    NahmRoundtrip,
    S1Isometry,
}

/// A registered case and its default tolerance.
#[derive(Debug, Clone, Copy)]
pub struct CaseSpec {
    pub id: &'static str,
    pub tol: f64,
    pub description: &'static str,
}

const fn case(id: &'static str, tol: f64, description: &'static str) -> CaseSpec {
    CaseSpec {
        id,
        tol,
        description,
    }
}

// Order and slope cases report `required − observed`, so their tolerance is an allowed deficit.
const MA_CASES: &[CaseSpec] = &[
    case(
        "quartic-vanishing",
        1e-9,
        "max |A_ijkl| from the series solve",
    ),
    case("quartic-matching", 1e-9, "max |3A − Σ rearranged R / 6|"),
    case(
        "jet-residual-low-degree",
        1e-12,
        "Monge–Ampère residual through degree 5",
    ),
    case(
        "residual-slope",
        0.0,
        "4.5 minus the log-log slope of the S² residual",
    ),
];
const KAHLER_CASES: &[CaseSpec] = &[
    case(
        "oracle-closed-form",
        1e-10,
        "jet oracle vs (R_ijkl + R_ilkj)/6",
    ),
    case(
        "sphere-special-values",
        1e-10,
        "S² components and plane curvatures",
    ),
    case(
        "curvature-table",
        1e-10,
        "max abs error of the emitted table",
    ),
    case(
        "negative-plane-witness",
        0.0,
        "nonnegative tensors without an exact witness",
    ),
];
const COMPLEXIFY_CASES: &[CaseSpec] = &[
    case("phi-inverse", 1e-10, "recovery of (a, v) from a·exp(iv)"),
    case("phi-equivariance", 1e-10, "φ(g·p) vs g·φ(p)"),
    case("psi-equivariance", 0.0, "cosets where ψ(g·p) ≠ g·ψ(p)"),
    case(
        "psi-isotropy",
        0.0,
        "cosets moved by the right isotropy action",
    ),
    case(
        "cr-order-group",
        0.0,
        "1.9 minus the CR residual order of group leaves",
    ),
    case(
        "cr-order-coset",
        0.0,
        "1.9 minus the CR residual order of coset leaves",
    ),
];
const GAUGE_CASES: &[CaseSpec] = &[
    case(
        "euler-top-residual",
        1e-8,
        "Nahm residual of an integrated Euler top",
    ),
    case("gauge-invariance", 10.0, "gauged over ungauged residual"),
    case("gauge-composition", 1e-8, "(gh)·T vs g·(h·T)"),
    case(
        "xi-constancy",
        1e-6,
        "sup deviation of the gauged T1 from its endpoint",
    ),
    case("moment-map-m-endpoints", 1e-12, "|Φ| with endpoints in m"),
    case(
        "moment-map-based-gauge",
        1e-12,
        "Φ shift under gauges with g(0) = g(1) = 1",
    ),
];
const ROUNDTRIP_CASES: &[CaseSpec] = &[
    case("roundtrip-error", 1e-6, "‖roundtrip(a, v) − a·exp(iv)‖"),
    case(
        "roundtrip-order",
        0.2,
        "max |observed order − 4| under step halving",
    ),
    case("zero-vector", 1e-12, "‖roundtrip(a, 0) − a‖"),
    case("path-independence", 1e-8, "twisted vs geodesic embedding"),
];
const S1_CASES: &[CaseSpec] = &[
    case(
        "omega-antisymmetry",
        1e-14,
        "|ω_I(X,Y) + ω_I(Y,X)| and |ω_I(X,X)|",
    ),
    case("i-invariance", 1e-14, "|ω_I(IX,IY) − ω_I(X,Y)|"),
    case("metric-invariance", 1e-14, "circle action on the L² metric"),
    case("omega-invariance", 1e-14, "circle action on ω_I"),
    case("potential-invariance", 1e-14, "circle action on f"),
    case(
        "d-i-df-order",
        0.0,
        "1.9 minus the grid order of d(I df) → ω_I",
    ),
    case(
        "potential-on-tangents",
        1e-8,
        "f on embedded tangents vs ½|v|²",
    ),
];

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::MaExpansion,
        Suite::KahlerCurvature,
        Suite::ComplexifyHolomorphy,
        Suite::NahmGauge,
        Suite::NahmRoundtrip,
        Suite::S1Isometry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MaExpansion => "ma-expansion",
            Suite::KahlerCurvature => "kahler-curvature",
            Suite::ComplexifyHolomorphy => "complexify-holomorphy",
            Suite::NahmGauge => "nahm-gauge",
            Suite::NahmRoundtrip => "nahm-roundtrip",
            Suite::S1Isometry => "s1-isometry",
        }
    }

    pub fn cases(self) -> &'static [CaseSpec] {
        match self {
            Suite::MaExpansion => MA_CASES,
            Suite::KahlerCurvature => KAHLER_CASES,
            Suite::ComplexifyHolomorphy => COMPLEXIFY_CASES,
            Suite::NahmGauge => GAUGE_CASES,
            Suite::NahmRoundtrip => ROUNDTRIP_CASES,
            Suite::S1Isometry => S1_CASES,
        }
    }

    pub fn sweeps(self) -> &'static [(&'static str, usize)] {
        match self {
            Suite::MaExpansion => &[("tensors", 20), ("samples", 400)],
            Suite::KahlerCurvature => &[("tensors", 20), ("table-dimension", 3)],
            Suite::ComplexifyHolomorphy => &[("points", 20)],
            Suite::NahmGauge => &[("gauges", 20), ("tangents", 5)],
            Suite::NahmRoundtrip => &[("pairs", 100), ("zero-cases", 20)],
            Suite::S1Isometry => &[("samples", 10)],
        }
    }

    pub fn from_name(name: &str) -> CliResult<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| CliError::UnknownSuite(name.to_string()))
    }

    /// Expands `all` and removes duplicates, keeping registry order.
    pub fn expand(names: &[String]) -> CliResult<Vec<Suite>> {
        let mut out = Vec::new();
        for name in names {
            if name == "all" {
                out.extend(Suite::ALL);
            } else {
                out.push(Suite::from_name(name)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// CSV tables produced alongside the report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tables {
    pub curvature: Option<String>,
    pub residual_vs_eps: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutput {
    pub records: Vec<ReportRecord>,
    pub tables: Tables,
}

enum Outcome {
    Measured(f64, String),
    Skipped(String),
}

struct Runner<'a> {
    cfg: &'a SuiteConfig,
    records: Vec<ReportRecord>,
}

impl Runner<'_> {
    fn case(&mut self, id: &str, f: impl FnOnce() -> tubegeom::Result<Outcome>) {
        let suite = self.cfg.suite.name();
        let tol = self.cfg.tol(id);
        let start = Instant::now();
        let mut record = match f() {
            Ok(Outcome::Measured(metric, note)) => {
                ReportRecord::check(suite, id, metric, tol, note)
            }
            Ok(Outcome::Skipped(note)) => ReportRecord::skip(suite, id, tol, note),
            Err(e) => ReportRecord::check(suite, id, f64::MAX, tol, e.to_string()),
        };
        if self.cfg.timing {
            record.ms = start.elapsed().as_millis() as u64;
        }
        self.records.push(record);
    }
}

fn measured(metric: f64, note: String) -> tubegeom::Result<Outcome> {
    Ok(Outcome::Measured(metric, note))
}

fn no_split(ctx: &LieAlgebraContext) -> tubegeom::Result<Outcome> {
    Ok(Outcome::Skipped(format!(
        "context {} has no isotropy split",
        ctx.name()
    )))
}

/// Runs every case of `cfg.suite` and returns its records in registry order.
pub fn run_suite(cfg: &SuiteConfig) -> CliResult<SuiteOutput> {
    let ctx = algebras::resolve(&cfg.context)
        .map_err(|e| CliError::ConfigParse(format!("context `{}`: {e}", cfg.context)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(cfg.suite as u64);
    let mut runner = Runner {
        cfg,
        records: Vec::new(),
    };
    let mut tables = Tables::default();
    match cfg.suite {
        Suite::MaExpansion => ma_expansion(&mut runner, &mut rng, &mut tables),
        Suite::KahlerCurvature => kahler_curvature(&mut runner, &mut rng, &mut tables),
        Suite::ComplexifyHolomorphy => complexify_holomorphy(&mut runner, &mut rng, &ctx),
        Suite::NahmGauge => nahm_gauge(&mut runner, &mut rng, &ctx),
        Suite::NahmRoundtrip => nahm_roundtrip(&mut runner, &mut rng, &ctx),
        Suite::S1Isometry => s1_isometry(&mut runner, &mut rng, &ctx),
    }
    Ok(SuiteOutput {
        records: runner.records,
        tables,
    })
}

fn log2_ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = x.iter().sum::<f64>() / x.len() as f64;
    let my = y.iter().sum::<f64>() / y.len() as f64;
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

const REQUIRED_SLOPE: f64 = 4.5;
const REQUIRED_ORDER: f64 = 1.9;

fn ma_expansion(r: &mut Runner, rng: &mut ChaCha8Rng, tables: &mut Tables) {
    let tensors: Vec<CurvatureTensor> = (0..r.cfg.sweep("tensors"))
        .map(|k| CurvatureTensor::random(2 + k % 2, rng, 1.0))
        .collect();
    let solved = tensors
        .iter()
        .map(series_solve_quartic)
        .collect::<tubegeom::Result<Vec<_>>>();

    r.case("quartic-vanishing", || {
        let worst = solved
            .clone()?
            .iter()
            .map(|s| s.coefficients.max_abs())
            .fold(0.0, f64::max);
        measured(worst, format!("{} tensors", tensors.len()))
    });
    r.case("quartic-matching", || {
        let mut worst: f64 = 0.0;
        for (t, s) in tensors.iter().zip(solved.clone()?) {
            for idx in ordered_quadruples(t.dimension()) {
                let a = s.coefficients.a(idx[0], idx[1], idx[2], idx[3]);
                worst = worst.max((3.0 * a - curvature_rearrangement_sum(t, idx) / 6.0).abs());
            }
        }
        measured(worst, String::new())
    });
    r.case("jet-residual-low-degree", || {
        let mut worst: f64 = 0.0;
        for t in &tensors {
            worst = worst.max(
                ma_residual(&potential_expansion(t)?)?
                    .truncated(5)
                    .max_abs_coefficient(),
            );
        }
        measured(worst, String::new())
    });

    let samples = r.cfg.sweep("samples");
    r.case("residual-slope", || {
        let eval = PointwiseResidual::new(&sphere_potential())?;
        let points: Vec<[f64; 4]> = (0..samples).map(|_| polydisk_point(rng)).collect();
        let eps: Vec<f64> = (0..=8).map(|k| 10f64.powf(-2.0 + k as f64 / 8.0)).collect();
        let mut sups = Vec::with_capacity(eps.len());
        for &e in &eps {
            let mut sup: f64 = 0.0;
            for p in &points {
                sup = sup.max(eval.eval(&p.map(|c| c * e))?);
            }
            sups.push(sup);
        }
        let mut csv = String::from("eps,sup_residual\n");
        for (e, s) in eps.iter().zip(&sups) {
            csv.push_str(&format!("{e:e},{s:e}\n"));
        }
        tables.residual_vs_eps = Some(csv);
        let slope = fit_slope(
            &eps.iter().map(|e| e.ln()).collect::<Vec<_>>(),
            &sups.iter().map(|s| s.ln()).collect::<Vec<_>>(),
        );
        measured(
            REQUIRED_SLOPE - slope,
            format!("slope {slope:.3} over {samples} polydisk points"),
        )
    });
}

/// `ρ = y₁² + y₂² − ⅓(x₁y₂ − x₂y₁)²` in variables `x₁, x₂, y₁, y₂`.
fn sphere_potential() -> RealJet {
    let v = |k| RealJet::variable(4, 6, k);
    let (x1, x2, y1, y2) = (v(0), v(1), v(2), v(3));
    let w = &(&x1 * &y2) - &(&x2 * &y1);
    &(&(&y1 * &y1) + &(&y2 * &y2)) - &(&w * &w).scale(1.0 / 3.0)
}

/// Uniform point of the unit polydisk in `(x₁, x₂, y₁, y₂)` order.
fn polydisk_point(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let mut p = [0.0; 4];
    for k in 0..2 {
        let rad = rng.gen_range(0.0f64..1.0).sqrt();
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        p[k] = rad * th.cos();
        p[2 + k] = rad * th.sin();
    }
    p
}

fn kahler_curvature(r: &mut Runner, rng: &mut ChaCha8Rng, tables: &mut Tables) {
    let count = r.cfg.sweep("tensors");
    r.case("oracle-closed-form", || {
        let mut worst: f64 = 0.0;
        for trial in 0..count {
            let n = 2 + trial % 2;
            let t = CurvatureTensor::random(n, rng, 1.0);
            let oracle = k_oracle_from_jet(&potential_expansion(&t)?)?;
            for [i, j, k, l] in all_indices(n) {
                let expected = (t.get(i, j, k, l) + t.get(i, l, k, j)) / 6.0;
                worst = worst.max((oracle.get(i, j, k, l) - expected).norm());
            }
        }
        measured(worst, format!("{count} tensors"))
    });
    r.case("sphere-special-values", || {
        let s2 = CurvatureTensor::constant_curvature(2, 1.0);
        let k = k_oracle_from_jet(&potential_expansion(&s2)?)?;
        let special = [
            (k.get(0, 1, 0, 1).re, 1.0 / 3.0),
            (k.get(0, 1, 1, 0).re, -1.0 / 6.0),
            (plane_from_components(&k, Plane::XY(0, 1))?, -1.0 / 3.0),
            (plane_from_components(&k, Plane::XX(0, 1))?, 1.0),
            (plane_from_components(&k, Plane::Holomorphic(0))?, 0.0),
            (plane_from_components(&k, Plane::Holomorphic(1))?, 0.0),
            (sectional_plane(&s2, Plane::XY(0, 1))?, -1.0 / 3.0),
        ];
        let worst = special
            .iter()
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let closed = k_components_at_zero(&s2)?.max_abs_difference(&k);
        measured(worst.max(closed), String::new())
    });
    let n = r.cfg.sweep("table-dimension");
    r.case("curvature-table", || {
        let t = CurvatureTensor::random(n, rng, 1.0);
        let rows = curvature_table(&t, &potential_expansion(&t)?)?;
        tables.curvature = Some(table_to_csv(&rows)?);
        let worst = rows.iter().map(|row| row.abs_error).fold(0.0, f64::max);
        measured(worst, format!("{} planes in dimension {n}", rows.len()))
    });
    r.case("negative-plane-witness", || {
        let tensors = nonnegative_tensors(rng)?;
        let mut missing = 0;
        for t in &tensors {
            let ok = match negative_plane_flag(t) {
                (true, Some(w)) => {
                    let (i, j) = w.plane.indices();
                    matches!(w.plane, Plane::XY(..))
                        && w.value == -t.get(i, j, i, j) / 3.0
                        && w.value < 0.0
                        && sectional_plane(t, w.plane)? == w.value
                }
                _ => false,
            };
            if !ok {
                missing += 1;
            }
        }
        measured(missing as f64, format!("{} tensors", tensors.len()))
    });
}

fn all_indices(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n * n * n * n).map(move |m| [m / (n * n * n), (m / (n * n)) % n, (m / n) % n, m % n])
}

/// Space forms, Gauss-equation tensors of PSD second fundamental forms, and `S² × R`.
fn nonnegative_tensors(rng: &mut ChaCha8Rng) -> tubegeom::Result<Vec<CurvatureTensor>> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for kappa in [0.5, 1.0, 3.0] {
            out.push(CurvatureTensor::constant_curvature(n, kappa));
        }
        for rank in 2..=n {
            for _ in 0..5 {
                let a = DMatrix::from_fn(n, rank, |_, _| rng.gen_range(-1.0..1.0));
                out.push(CurvatureTensor::gauss(&(&a * a.transpose()))?);
            }
        }
    }
    let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]));
    out.push(CurvatureTensor::gauss(&h)?);
    out.retain(|t| !t.is_zero());
    Ok(out)
}

const CR_STEPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

fn complexify_holomorphy(r: &mut Runner, rng: &mut ChaCha8Rng, ctx: &Arc<LieAlgebraContext>) {
    let points = r.cfg.sweep("points");
    r.case("phi-inverse", || {
        let mut worst: f64 = 0.0;
        for _ in 0..points {
            let a = random_group_element(ctx, rng, 3.0);
            let v = random_algebra_element(ctx, rng, 2.0);
            let back = phi_inverse(&phi_map(&TangentPoint::new(a.clone(), v.clone())?))?;
            worst = worst
                .max(back.base().distance(&a))
                .max(back.vector().distance(&v));
        }
        measured(worst, format!("{points} points on {}", ctx.name()))
    });
    r.case("phi-equivariance", || {
        let mut worst: f64 = 0.0;
        for _ in 0..points {
            let p = TangentPoint::new(
                random_group_element(ctx, rng, 3.0),
                random_algebra_element(ctx, rng, 2.0),
            )?;
            let g = random_group_element(ctx, rng, 3.0);
            let lhs = phi_map(&p.left_translate(&g)?);
            let rhs = g.mul(&phi_map(&p))?;
            worst = worst.max(lhs.distance(&rhs));
        }
        measured(worst, String::new())
    });
    r.case("psi-equivariance", || {
        if !ctx.has_split() {
            return no_split(ctx);
        }
        let mut moved = 0;
        for _ in 0..points {
            let p = TangentPoint::new_homogeneous(
                random_group_element(ctx, rng, 3.0),
                random_m_element(ctx, rng, 2.0)?,
            )?;
            let g = random_group_element(ctx, rng, 3.0);
            let lhs = psi_map(&p.left_translate(&g)?)?;
            if !lhs.same_coset(&psi_map(&p)?.left_translate(&g)?)? {
                moved += 1;
            }
        }
        measured(moved as f64, format!("{points} points"))
    });
    r.case("psi-isotropy", || {
        if !ctx.has_split() {
            return no_split(ctx);
        }
        let mut moved = 0;
        for _ in 0..points {
            let p = TangentPoint::new_homogeneous(
                random_group_element(ctx, rng, 3.0),
                random_m_element(ctx, rng, 1.5)?,
            )?;
            let h = group_exp(&project_h(&random_algebra_element(ctx, rng, 2.0))?);
            if !psi_map(&p.h_action(&h)?)?.same_coset(&psi_map(&p)?)? {
                moved += 1;
            }
        }
        measured(
            moved as f64,
            format!("{points} points, action (a h⁻¹, Ad_h v)"),
        )
    });
    r.case("cr-order-group", || {
        let mut order = f64::INFINITY;
        for _ in 0..points {
            let a = random_group_element(ctx, rng, 3.0);
            let x = random_algebra_element(ctx, rng, 1.5);
            let (t0, s0) = (rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
            let leaf = |t: f64, s: f64| -> Vec<C64> {
                match leaf_map(&a, &x, C64::new(t, s)) {
                    Ok(z) => z.matrix().iter().copied().collect(),
                    Err(_) => vec![C64::new(f64::NAN, 0.0)],
                }
            };
            let errors: Vec<f64> = CR_STEPS
                .iter()
                .map(|&h| cr_residual(leaf, t0, s0, h))
                .collect();
            order = order.min(min_of(log2_ratios(&errors)));
        }
        measured(REQUIRED_ORDER - order, format!("minimum order {order:.3}"))
    });
    r.case("cr-order-coset", || {
        let Some(model) = ctx.subgroup_model() else {
            return no_split(ctx);
        };
        let mut order = f64::INFINITY;
        for _ in 0..points {
            let a = random_group_element(ctx, rng, 3.0);
            let y = random_m_element(ctx, rng, 1.5)?;
            let (t0, s0) = (rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
            let reference = coset_leaf_map(&a, &y, C64::new(t0, s0))?;
            let chart = CosetChart::at(reference.representative().matrix(), model)?;
            let leaf = |t: f64, s: f64| -> Vec<C64> {
                coset_leaf_map(&a, &y, C64::new(t, s))
                    .and_then(|p| chart.coordinates(p.representative().matrix()))
                    .unwrap_or_else(|_| vec![C64::new(f64::NAN, 0.0)])
            };
            let errors: Vec<f64> = CR_STEPS
                .iter()
                .map(|&h| cr_residual(leaf, t0, s0, h))
                .collect();
            order = order.min(min_of(log2_ratios(&errors)));
        }
        measured(REQUIRED_ORDER - order, format!("minimum order {order:.3}"))
    });
}

/// Integrated Euler top with a nonzero constant `T0`.
fn euler_top(ctx: &Arc<LieAlgebraContext>, n: usize) -> tubegeom::Result<NahmConfiguration> {
    let d = ctx.dimension();
    let e = |k: usize| AlgebraElement::basis_vector(ctx, k % d);
    let init = [e(0)?.scale(1.0), e(1)?.scale(-0.75), e(2)?.scale(0.5)];
    let t0 = GaugePath::constant(ctx, PathKind::Algebra, n, &ctx.basis()[1 % d])?;
    nahm_integrate([&init[0], &init[1], &init[2]], &t0, 1e6)
}

fn nahm_gauge(r: &mut Runner, rng: &mut ChaCha8Rng, ctx: &Arc<LieAlgebraContext>) {
    let n = r.cfg.grid_size;
    let gauges = r.cfg.sweep("gauges");
    let tangents = r.cfg.sweep("tangents");
    let top = euler_top(ctx, n);
    let base = top
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|t| Ok(residual_sup(&nahm_residual(t)?)));

    r.case("euler-top-residual", || {
        measured(base.clone()?, format!("grid {n}"))
    });
    r.case("gauge-invariance", || {
        let t = top.clone()?;
        let base = base.clone()?;
        let mut gauged: f64 = 0.0;
        for k in 0..gauges {
            let g = random_smooth_gauge(ctx, rng, n, 1.0, k % 2 == 0)?;
            gauged = gauged.max(residual_sup(&nahm_residual(&gauge_act(&g, &t)?)?));
        }
        // Residuals below the roundoff scale of a grid derivative are not resolved.
        let size = t
            .components()
            .iter()
            .map(GaugePath::sup_norm)
            .fold(0.0, f64::max);
        let floor = f64::EPSILON * size * n as f64;
        let ratio = gauged / base.max(floor);
        measured(
            ratio,
            format!("ungauged {base:.2e}, gauged {gauged:.2e}, floor {floor:.2e}, {gauges} gauges"),
        )
    });
    r.case("gauge-composition", || {
        let t = top.clone()?;
        let mut worst: f64 = 0.0;
        for _ in 0..gauges.div_ceil(4) {
            let g = random_smooth_gauge(ctx, rng, n, 1.0, false)?;
            let h = random_smooth_gauge(ctx, rng, n, 1.0, false)?;
            let lhs = gauge_act(&g.pointwise_mul(&h)?, &t)?;
            let rhs = gauge_act(&g, &gauge_act(&h, &t)?)?;
            worst = worst.max(lhs.sup_distance(&rhs)?);
        }
        measured(worst, String::new())
    });
    r.case("xi-constancy", || {
        let mut worst: f64 = 0.0;
        for _ in 0..tangents {
            let a = random_group_element(ctx, rng, 3.0);
            let v = random_algebra_element(ctx, rng, 2.0);
            let (t0, t1) = embed_tangent(&a, &v, None, n)?;
            let xi = solve_gauge_ode(&t0)?;
            let zero = GaugePath::trivial(ctx, PathKind::Algebra, n);
            let p = gauge_act(&xi, &NahmConfiguration::new([t0, t1, zero.clone(), zero])?)?;
            let end = p.component(1).end().clone();
            worst = p
                .component(1)
                .values()
                .iter()
                .map(|m| dist(m, &end))
                .fold(worst, f64::max);
        }
        measured(worst, format!("{tangents} embedded tangents"))
    });
    r.case("moment-map-m-endpoints", || {
        if !ctx.has_split() {
            return no_split(ctx);
        }
        let t = top.clone()?;
        let end_m = |j: usize| -> tubegeom::Result<CMat> {
            let x = AlgebraElement::from_matrix(ctx, t.component(j).end())?;
            Ok(project_m(&x)?.matrix().clone())
        };
        let ends = [end_m(1)?, end_m(2)?, end_m(3)?];
        let size = ctx.matrix_size();
        let conf = NahmConfiguration::from_fns(
            ctx,
            n.min(200),
            [
                &|_| CMat::zeros(size, size),
                &|s| &ends[0] * C64::new(s, 0.0),
                &|s| &ends[1] * C64::new(s * s, 0.0),
                &|_| ends[2].clone(),
            ],
        )?;
        let worst = moment_map_h(&conf)?
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        measured(worst, String::new())
    });
    r.case("moment-map-based-gauge", || {
        if !ctx.has_split() {
            return no_split(ctx);
        }
        let t = top.clone()?;
        let before = moment_map_h(&t)?;
        let mut worst: f64 = 0.0;
        for _ in 0..gauges.div_ceil(2) {
            let g = random_smooth_gauge(ctx, rng, n, 1.0, true)?;
            for (p, q) in before.iter().zip(&moment_map_h(&gauge_act(&g, &t)?)?) {
                worst = worst.max(p.distance(q));
            }
        }
        measured(worst, String::new())
    });
}

fn nahm_roundtrip(r: &mut Runner, rng: &mut ChaCha8Rng, ctx: &Arc<LieAlgebraContext>) {
    let steps = r.cfg.ode_steps;
    let pairs: Vec<(_, _)> = (0..r.cfg.sweep("pairs"))
        .map(|_| {
            (
                random_group_element(ctx, rng, 3.0),
                random_algebra_element(ctx, rng, 2.0),
            )
        })
        .collect();
    let target = |a: &GroupElement, v: &AlgebraElement| -> tubegeom::Result<CMat> {
        Ok(phi_map(&TangentPoint::new(a.clone(), v.clone())?)
            .matrix()
            .clone())
    };

    r.case("roundtrip-error", || {
        let mut worst: f64 = 0.0;
        for (a, v) in &pairs {
            worst = worst.max(dist(
                roundtrip_adapted(a, v, steps)?.matrix(),
                &target(a, v)?,
            ));
        }
        measured(worst, format!("{} pairs, {steps} steps", pairs.len()))
    });
    r.case("roundtrip-order", || {
        let (mut lo, mut hi, mut band): (f64, f64, f64) = (f64::MAX, f64::MIN, 0.0);
        for (a, v) in &pairs {
            let z = target(a, v)?;
            // Coarsest grid has step·(|log a| + |v|) ≈ 1/16, keeping errors above roundoff.
            let scale = group_log(a)?.norm() + v.norm();
            let n0 = ((16.0 * scale).ceil() as usize).max(4);
            let mut errors = Vec::new();
            for n in [n0, 2 * n0, 4 * n0] {
                errors.push(dist(roundtrip_adapted(a, v, n)?.matrix(), &z));
            }
            for rate in log2_ratios(&errors) {
                lo = lo.min(rate);
                hi = hi.max(rate);
                band = band.max((rate - 4.0).abs());
            }
        }
        measured(band, format!("orders in [{lo:.3}, {hi:.3}]"))
    });
    let zero_cases = r.cfg.sweep("zero-cases");
    r.case("zero-vector", || {
        let mut worst: f64 = 0.0;
        for _ in 0..zero_cases {
            let a = random_group_element(ctx, rng, 3.0);
            let back = roundtrip_adapted(&a, &AlgebraElement::zero(ctx), steps)?;
            worst = worst.max(dist(back.matrix(), a.matrix()));
        }
        measured(worst, format!("{zero_cases} elements"))
    });
    r.case("path-independence", || {
        let mut worst: f64 = 0.0;
        for (a, v) in pairs.iter().take(10) {
            let y = random_algebra_element(ctx, rng, 1.0);
            let twisted = TwistedHPath::new(a, &y)?;
            let via_twisted = roundtrip_adapted_with_path(a, v, &twisted, steps)?;
            let via_geodesic = roundtrip_adapted(a, v, steps)?;
            worst = worst.max(via_twisted.distance(&via_geodesic));
        }
        measured(worst, String::new())
    });
}

/// Configuration with components `c₀ + c₁ sin 3t + c₂ t²`.
fn random_config(
    ctx: &Arc<LieAlgebraContext>,
    rng: &mut ChaCha8Rng,
    n: usize,
) -> tubegeom::Result<NahmConfiguration> {
    let c: Vec<[CMat; 3]> = (0..4)
        .map(|_| std::array::from_fn(|_| random_algebra_element(ctx, rng, 1.0).matrix().clone()))
        .collect();
    let f = |j: usize| {
        let c = c[j].clone();
        move |t: f64| &c[0] + &c[1] * C64::new((3.0 * t).sin(), 0.0) + &c[2] * C64::new(t * t, 0.0)
    };
    let (f0, f1, f2, f3) = (f(0), f(1), f(2), f(3));
    NahmConfiguration::from_fns(ctx, n, [&f0, &f1, &f2, &f3])
}

fn s1_isometry(r: &mut Runner, rng: &mut ChaCha8Rng, ctx: &Arc<LieAlgebraContext>) {
    let n = r.cfg.grid_size;
    let count = r.cfg.sweep("samples");
    let samples = (0..count)
        .map(|_| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            Ok((
                random_config(ctx, rng, n)?,
                random_config(ctx, rng, n)?,
                random_config(ctx, rng, n)?,
                theta,
            ))
        })
        .collect::<tubegeom::Result<Vec<_>>>();
    let over = |check: &dyn Fn(
        &(NahmConfiguration, NahmConfiguration, NahmConfiguration, f64),
    ) -> tubegeom::Result<f64>|
     -> tubegeom::Result<Outcome> {
        let mut worst: f64 = 0.0;
        for s in samples.as_ref().map_err(Clone::clone)? {
            worst = worst.max(check(s)?);
        }
        measured(worst, format!("{count} samples on grid {n}"))
    };

    r.case("omega-antisymmetry", || {
        over(&|(_, x, y, _)| {
            let sym = (omega_i(x, y)? + omega_i(y, x)?).abs();
            Ok(sym.max(omega_i(x, x)?.abs()))
        })
    });
    r.case("i-invariance", || {
        over(&|(_, x, y, _)| Ok((omega_i(&apply_i(x), &apply_i(y))? - omega_i(x, y)?).abs()))
    });
    r.case("metric-invariance", || {
        over(&|(_, x, y, th)| {
            Ok((l2_metric(&s1_action(*th, x)?, &s1_action(*th, y)?)? - l2_metric(x, y)?).abs())
        })
    });
    r.case("omega-invariance", || {
        over(&|(_, x, y, th)| {
            Ok((omega_i(&s1_action(*th, x)?, &s1_action(*th, y)?)? - omega_i(x, y)?).abs())
        })
    });
    r.case("potential-invariance", || {
        over(&|(b, _, _, th)| {
            Ok((kahler_potential_f(&s1_action(*th, b)?)? - kahler_potential_f(b)?).abs())
        })
    });
    r.case("d-i-df-order", || {
        let order = d_i_df_order(ctx, rng)?;
        measured(
            REQUIRED_ORDER - order,
            format!("minimum order {order:.3} on grids 10..80"),
        )
    });
    r.case("potential-on-tangents", || {
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let a = random_group_element(ctx, rng, 3.0);
            let v = random_algebra_element(ctx, rng, 2.0);
            let y = random_algebra_element(ctx, rng, 1.0);
            let twisted = TwistedHPath::new(&a, &y)?;
            for path in [None, Some(&twisted as &dyn HPath)] {
                let (t0, t1) = embed_tangent(&a, &v, path, n)?;
                let zero = GaugePath::trivial(ctx, PathKind::Algebra, n);
                let f = kahler_potential_f(&NahmConfiguration::new([t0, t1, zero.clone(), zero])?)?;
                worst = worst.max((f - 0.5 * v.norm().powi(2)).abs());
            }
        }
        measured(
            worst,
            format!("{count} tangents, geodesic and twisted paths"),
        )
    });
}

/// Minimum grid order of `d(I df)(X, Y)` against the exact `ω_I(X, Y)` for
/// tangents `X_j = e^{λ_j t} A_j`.
fn d_i_df_order(ctx: &Arc<LieAlgebraContext>, rng: &mut ChaCha8Rng) -> tubegeom::Result<f64> {
    let lx = [0.7, -1.2, 1.5, 0.4];
    let ly = [1.1, 0.3, -0.8, 2.0];
    let ax: Vec<AlgebraElement> = (0..4)
        .map(|_| random_algebra_element(ctx, rng, 1.0))
        .collect();
    let ay: Vec<AlgebraElement> = (0..4)
        .map(|_| random_algebra_element(ctx, rng, 1.0))
        .collect();
    let integral = |l: f64| (l.exp() - 1.0) / l;
    let pair = |a: usize, b: usize| -> tubegeom::Result<f64> {
        Ok(ax[a].inner(&ay[b])? * integral(lx[a] + ly[b]))
    };
    let continuum = pair(0, 1)? - pair(1, 0)? + pair(2, 3)? - pair(3, 2)?;
    let exponential = |coeffs: &[AlgebraElement], l: [f64; 4], n: usize| {
        let f = |j: usize| {
            let m = coeffs[j].matrix().clone();
            let lj = l[j];
            move |t: f64| &m * C64::new((lj * t).exp(), 0.0)
        };
        let (f0, f1, f2, f3) = (f(0), f(1), f(2), f(3));
        NahmConfiguration::from_fns(ctx, n, [&f0, &f1, &f2, &f3])
    };
    let base_seed: u64 = rng.gen();
    let mut errors = Vec::new();
    for n in [10, 20, 40, 80] {
        let base = random_config(ctx, &mut ChaCha8Rng::seed_from_u64(base_seed), n)?;
        let x = exponential(&ax, lx, n)?;
        let y = exponential(&ay, ly, n)?;
        errors.push((d_i_df(kahler_potential_f, &base, &x, &y, 1e-2)? - continuum).abs());
    }
    Ok(min_of(log2_ratios(&errors)))
}
