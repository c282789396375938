//! Benchmark functions on box domains, with the affine map to `[-1, 1]^m`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mindex::PNorm;
use crate::nodes::NodeFamily;
use crate::transform::{fnt_forward, NewtonInterpolant, NewtonSpace};

/// Thermal voltage at 25 °C used by the solar cell model.
pub const SOLAR_THERMAL_VOLTAGE: f64 = 2.585e-2;
/// Number of cells in series for the solar cell model.
pub const SOLAR_CELLS_IN_SERIES: f64 = 1.0;

/// A product of intervals with labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    names: Vec<String>,
    units: Vec<String>,
}

impl BoxDomain {
    pub fn new(bounds: &[(f64, f64)], names: &[&str], units: &[&str]) -> Result<Self> {
        if bounds.is_empty() || names.len() != bounds.len() || units.len() != bounds.len() {
            return Err(Error::InvalidArgument(
                "bounds, names and units must have the same nonzero length".into(),
            ));
        }
        if let Some(i) = bounds.iter().position(|&(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi) {
            return Err(Error::InvalidArgument(format!(
                "dimension {} has invalid bounds ({}, {})",
                i + 1,
                bounds[i].0,
                bounds[i].1
            )));
        }
        Ok(BoxDomain {
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
            names: names.iter().map(|s| s.to_string()).collect(),
            units: units.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// `[-1, 1]^m` with generic labels.
    pub fn reference(m: usize) -> Self {
        BoxDomain {
            lower: vec![-1.0; m],
            upper: vec![1.0; m],
            names: (1..=m).map(|i| format!("x{i}")).collect(),
            units: vec![String::new(); m],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    /// `(upper - lower) / 2` per dimension, the Jacobian of [`Self::from_reference`].
    pub fn half_widths(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (u - l)).collect()
    }

    pub fn to_reference(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| (2.0 * v - l - u) / (u - l))
            .collect()
    }

    pub fn from_reference(&self, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; u.len()];
        self.from_reference_into(u, &mut x);
        x
    }

    pub fn from_reference_into(&self, u: &[f64], x: &mut [f64]) {
        for (((o, &v), &l), &h) in x.iter_mut().zip(u).zip(&self.lower).zip(&self.upper) {
            *o = 0.5 * (l + h) + 0.5 * (h - l) * v;
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&l, &u))| l <= v && v <= u)
    }
}

pub(crate) fn format_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:e}")).collect();
    format!("({})", parts.join(", "))
}

type Evaluator = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

/// A named function of physical inputs on a box.
#[derive(Clone)]
pub struct BenchmarkModel {
    name: String,
    domain: BoxDomain,
    eval: Evaluator,
}

impl fmt::Debug for BenchmarkModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkModel")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl BenchmarkModel {
    pub fn new<F>(name: &str, domain: BoxDomain, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
    {
        BenchmarkModel {
            name: name.to_string(),
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let v = (self.eval)(x)?;
        if !v.is_finite() {
            return Err(Error::ModelEval {
                model: self.name.clone(),
                point: format_point(x),
                reason: "non-finite output".into(),
            });
        }
        Ok(v)
    }

    /// Evaluates at a point of `[-1, 1]^m`.
    pub fn evaluate_reference(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                actual: u.len(),
            });
        }
        self.evaluate(&self.domain.from_reference(u))
    }
}

/// Mid-point voltage of the OTL push-pull circuit.
///
/// Inputs `(R_b1, R_b2, R_f, R_c1, R_c2, β)`.
pub fn otl_circuit(x: &[f64]) -> f64 {
    let (rb1, rb2, rf, rc1, rc2, beta) = (x[0], x[1], x[2], x[3], x[4], x[5]);
    let vb1 = 12.0 * rb2 / (rb1 + rb2);
    let b = beta * (rc2 + 9.0);
    let denom = b + rf;
    (vb1 + 0.74) * b / denom + 11.35 * rf / denom + 0.74 * rf * b / (denom * rc1)
}

/// Cycle time of the piston.
///
/// Inputs `(M, S, V_0, k, P_0, T_a, T_0)`.
pub fn piston(x: &[f64]) -> f64 {
    let (mass, s, v0, k, p0, ta, t0) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
    let a = p0 * s + 19.62 * mass - k * v0 / s;
    let gas = p0 * v0 / t0;
    let v = s / (2.0 * k) * ((a * a + 4.0 * k * gas * ta).sqrt() - a);
    2.0 * std::f64::consts::PI * (mass / (k + s * s * gas * ta / (v * v))).sqrt()
}

/// Parameters of one solar cell instance, derived from the physical inputs.
#[derive(Debug, Clone, Copy)]
struct SolarCell {
    i_l: f64,
    i_s: f64,
    r_s: f64,
    r_p: f64,
    /// `n_s · n · V_th`.
    a: f64,
}

impl SolarCell {
    fn new(x: &[f64]) -> Self {
        let (i_sc, i_s, n, r_s, r_p) = (x[0], x[1].exp(), x[2], x[3], x[4]);
        let a = SOLAR_CELLS_IN_SERIES * n * SOLAR_THERMAL_VOLTAGE;
        let i_l = i_sc + i_s * ((i_sc * r_s / a).exp() - 1.0) + i_sc * r_s / r_p;
        SolarCell { i_l, i_s, r_s, r_p, a }
    }

    /// Residual of the implicit current equation and its derivative in `I`.
    fn residual(&self, v: f64, i: f64) -> (f64, f64) {
        let vd = v + i * self.r_s;
        let e = (vd / self.a).exp();
        let g = self.i_l - self.i_s * (e - 1.0) - vd / self.r_p - i;
        let dg = -self.i_s * e * self.r_s / self.a - self.r_s / self.r_p - 1.0;
        (g, dg)
    }

    /// `I(V)`: the root of the decreasing residual in `[-2 I_L, 2 I_L]`.
    fn current(&self, v: f64) -> Option<f64> {
        let (mut lo, mut hi) = (-2.0 * self.i_l, 2.0 * self.i_l);
        if self.residual(v, lo).0 < 0.0 || self.residual(v, hi).0 > 0.0 {
            return None;
        }
        safeguarded_newton(|i| self.residual(v, i), &mut lo, &mut hi, self.i_l)
    }

    /// The open-circuit voltage, where `I(V) = 0`.
    fn open_circuit_voltage(&self) -> Option<f64> {
        let f = |v: f64| {
            let e = (v / self.a).exp();
            (
                self.i_l - self.i_s * (e - 1.0) - v / self.r_p,
                -self.i_s * e / self.a - 1.0 / self.r_p,
            )
        };
        let (mut lo, mut hi) = (0.0, self.a * (self.i_l / self.i_s + 1.0).ln());
        safeguarded_newton(f, &mut lo, &mut hi, self.i_l)
    }
}

/// Newton's method kept inside a sign-change bracket `f(lo) ≥ 0 ≥ f(hi)`,
/// falling back to bisection whenever a step leaves the bracket.
fn safeguarded_newton<F: Fn(f64) -> (f64, f64)>(f: F, lo: &mut f64, hi: &mut f64, scale: f64) -> Option<f64> {
    let tol = 1e-12 * scale.abs().max(f64::MIN_POSITIVE);
    let mut x = 0.5 * (*lo + *hi);
    for _ in 0..200 {
        let (g, dg) = f(x);
        if !g.is_finite() {
            return None;
        }
        if g.abs() <= tol {
            return Some(x);
        }
        if g > 0.0 {
            *lo = x;
        } else {
            *hi = x;
        }
        let step = x - g / dg;
        x = if dg != 0.0 && step > *lo && step < *hi {
            step
        } else {
            0.5 * (*lo + *hi)
        };
        if *hi - *lo <= f64::EPSILON * lo.abs().max(hi.abs()) {
            return Some(x);
        }
    }
    None
}

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Points in the pre-scan of the power curve.
const SOLAR_SCAN: usize = 64;

/// Maximum power `max_V V·I(V)` of a single-diode cell over `[0, V_oc]`.
///
/// Inputs `(I_sc, log I_s, n, R_s, R_p)`; the second input is a natural
/// logarithm and is exponentiated here.
pub fn solar_cell(x: &[f64]) -> Result<f64> {
    let fail = |reason: &str| Error::ModelEval {
        model: "solar".into(),
        point: format_point(x),
        reason: reason.into(),
    };
    let cell = SolarCell::new(x);
    let v_oc = cell
        .open_circuit_voltage()
        .ok_or_else(|| fail("open-circuit voltage not bracketed"))?;
    let power = |v: f64| cell.current(v).map(|i| v * i);

    let mut scan = Vec::with_capacity(SOLAR_SCAN + 1);
    for k in 0..=SOLAR_SCAN {
        let v = v_oc * k as f64 / SOLAR_SCAN as f64;
        scan.push(power(v).ok_or_else(|| fail("current equation not bracketed"))?);
    }
    // The power curve is unimodal for physical inputs; if the scan shows more
    // than one local maximum, refine around the global one anyway.
    let best = (0..scan.len())
        .max_by(|&i, &j| scan[i].total_cmp(&scan[j]).then(j.cmp(&i)))
        .expect("scan is nonempty");
    let step = v_oc / SOLAR_SCAN as f64;
    let a = step * best.saturating_sub(1) as f64;
    let b = (step * (best + 1) as f64).min(v_oc);
    let v_star = golden_max(|v| power(v).unwrap_or(f64::NEG_INFINITY), a, b, 1e-10);
    let p = power(v_star).ok_or_else(|| fail("current equation not bracketed"))?;
    Ok(p.max(scan[best]))
}

fn model_otl() -> BenchmarkModel {
    let domain = BoxDomain::new(
        &[(50.0, 150.0), (25.0, 70.0), (0.5, 3.0), (1.2, 2.5), (0.25, 1.2), (50.0, 300.0)],
        &["Rb1", "Rb2", "Rf", "Rc1", "Rc2", "beta"],
        &["kOhm", "kOhm", "kOhm", "kOhm", "kOhm", "A"],
    )
    .expect("static bounds");
    BenchmarkModel::new("otl", domain, |x| Ok(otl_circuit(x)))
}

fn model_piston() -> BenchmarkModel {
    let domain = BoxDomain::new(
        &[
            (30.0, 60.0),
            (0.005, 0.02),
            (0.002, 0.01),
            (1000.0, 5000.0),
            (90000.0, 110000.0),
            (290.0, 296.0),
            (340.0, 360.0),
        ],
        &["M", "S", "V0", "k", "P0", "Ta", "T0"],
        &["kg", "m^2", "m^3", "N/m", "N/m^2", "K", "K"],
    )
    .expect("static bounds");
    BenchmarkModel::new("piston", domain, |x| Ok(piston(x)))
}

fn model_solar() -> BenchmarkModel {
    let domain = BoxDomain::new(
        &[(0.05989, 0.23958), (-24.54, -15.33), (1.0, 2.0), (0.16625, 0.665), (93.75, 375.0)],
        &["Isc", "log(Is)", "n", "Rs", "Rp"],
        &["A", "log A", "-", "Ohm", "Ohm"],
    )
    .expect("static bounds");
    BenchmarkModel::new("solar", domain, solar_cell)
}

/// A polynomial of total degree 2 on `[-1, 1]^m` without mixed terms, so it
/// lies in `Π_{A_{m,n,p}}` for every `n ≥ 2` and `p`.
pub fn synthetic_polynomial(m: usize) -> BenchmarkModel {
    BenchmarkModel::new("poly", BoxDomain::reference(m), |x| {
        let linear: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
        Ok(1.0 + linear / x.len() as f64 + 0.5 * x[0] * x[0])
    })
}

/// The three benchmark models.
pub fn registry() -> Vec<BenchmarkModel> {
    vec![model_solar(), model_otl(), model_piston()]
}

/// Looks a model up by name; `poly` needs the dimension `m`.
pub fn lookup(name: &str, m: Option<usize>) -> Result<BenchmarkModel> {
    match name {
        "poly" => match m {
            Some(m) if m >= 1 => Ok(synthetic_polynomial(m)),
            _ => Err(Error::InvalidArgument("model `poly` needs --m >= 1".into())),
        },
        _ => registry()
            .into_iter()
            .find(|model| model.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model `{name}`"))),
    }
}

/// Samples `model` on the grid of `space` (reference coordinates) and
/// transforms the values to Newton coefficients.
pub fn interpolate(model: &BenchmarkModel, space: &Arc<NewtonSpace>) -> Result<NewtonInterpolant> {
    if model.dim() != space.dim() {
        return Err(Error::LengthMismatch {
            expected: model.dim(),
            actual: space.dim(),
        });
    }
    use rayon::prelude::*;
    let samples: Vec<f64> = space
        .grid()
        .par_chunks_exact(space.dim())
        .map(|u| model.evaluate_reference(u))
        .collect::<Result<_>>()?;
    fnt_forward(space, &samples)
}

/// Root mean square error of `interp` against `model` at `count` uniform
/// points of `[-1, 1]^m`, drawn from a seeded stream.
pub fn rmse(model: &BenchmarkModel, interp: &NewtonInterpolant, count: usize, seed: u64) -> Result<f64> {
    let m = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<f64> = (0..count * m).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let approx = interp.evaluate_many(&points)?;
    let mut sum = 0.0;
    for (u, a) in points.chunks_exact(m).zip(&approx) {
        let e = model.evaluate_reference(u)? - a;
        sum += e * e;
    }
    Ok((sum / count.max(1) as f64).sqrt())
}

/// Builds the space, interpolates and reports the RMSE on `test_points`.
pub fn approximation_rmse(
    model: &BenchmarkModel,
    n: usize,
    p: PNorm,
    family: NodeFamily,
    test_points: usize,
    seed: u64,
) -> Result<(usize, f64)> {
    let space = Arc::new(NewtonSpace::lp(model.dim(), n, p, family)?);
    let interp = interpolate(model, &space)?;
    Ok((space.len(), rmse(model, &interp, test_points, seed)?))
}
