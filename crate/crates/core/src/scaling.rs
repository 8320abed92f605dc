//! Linear scaling law `N_c = A + B·k + C·log2(N_b)` and derived quantities.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One aggregated cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub k: f64,
    pub log2_nb: f64,
    pub nc_mean: f64,
    /// Regression weight, usually `1 / Var(mean)`.
    pub weight: f64,
}

impl ScalingPoint {
    pub fn new(k: f64, log2_nb: f64, nc_mean: f64, weight: f64) -> Self {
        Self {
            k,
            log2_nb,
            nc_mean,
            weight,
        }
    }

    /// Weight from the standard error of the cell mean; falls back to 1 when
    /// the error is zero or unknown.
    pub fn from_sem(k: f64, log2_nb: f64, nc_mean: f64, sem: f64) -> Self {
        let weight = if sem > 0.0 && sem.is_finite() { 1.0 / (sem * sem) } else { 1.0 };
        Self::new(k, log2_nb, nc_mean, weight)
    }
}

/// Range of `(k, log2 N_b)` covered by the fitted data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub k_min: f64,
    pub k_max: f64,
    pub log2_nb_min: f64,
    pub log2_nb_max: f64,
}

impl DomainBox {
    pub fn contains(&self, k: f64, log2_nb: f64) -> bool {
        (self.k_min..=self.k_max).contains(&k) && (self.log2_nb_min..=self.log2_nb_max).contains(&log2_nb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Intercept.
    pub a: f64,
    /// Shocks per bit of perturbation exponent.
    pub b: f64,
    /// Shocks per doubling of the ball count.
    pub c: f64,
    pub se_a: f64,
    pub se_b: f64,
    pub se_c: f64,
    /// Parameter covariance in `(a, b, c)` order.
    pub covariance: [[f64; 3]; 3],
    /// Unweighted RMS of the residuals.
    pub residual_rms: f64,
    pub n_points: usize,
    pub domain: DomainBox,
}

impl ScalingFit {
    /// Fit from known coefficients, without uncertainty.
    pub fn exact(a: f64, b: f64, c: f64, domain: DomainBox) -> Self {
        Self {
            a,
            b,
            c,
            se_a: 0.0,
            se_b: 0.0,
            se_c: 0.0,
            covariance: [[0.0; 3]; 3],
            residual_rms: 0.0,
            n_points: 0,
            domain,
        }
    }

    pub fn predict(&self, k: f64, log2_nb: f64) -> f64 {
        self.a + self.b * k + self.c * log2_nb
    }

    pub fn t_b(&self) -> f64 {
        self.b / self.se_b
    }

    pub fn t_c(&self) -> f64 {
        self.c / self.se_c
    }

    /// `key = value` report.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let d = &self.domain;
        for (key, value) in [
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("se_A", self.se_a),
            ("se_B", self.se_b),
            ("se_C", self.se_c),
            ("residual_rms", self.residual_rms),
            ("k_min", d.k_min),
            ("k_max", d.k_max),
            ("log2_nb_min", d.log2_nb_min),
            ("log2_nb_max", d.log2_nb_max),
        ] {
            let _ = writeln!(s, "{key} = {value}");
        }
        let _ = writeln!(s, "n_points = {}", self.n_points);
        s
    }

    /// Parse the output of [`ScalingFit::report`]. Covariance terms other
    /// than the variances are not part of the report and read back as zero.
    pub fn from_report(text: &str) -> Result<Self> {
        let mut map = std::collections::HashMap::new();
        for line in text.lines() {
            if let Some((k, v)) = line.split_once('=') {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let get = |k: &str| -> Result<f64> {
            map.get(k)
                .ok_or_else(|| Error::Config(format!("fit report lacks '{k}'")))?
                .parse()
                .map_err(|_| Error::Config(format!("bad value for '{k}' in fit report")))
        };
        let (se_a, se_b, se_c) = (get("se_A")?, get("se_B")?, get("se_C")?);
        let mut covariance = [[0.0; 3]; 3];
        covariance[0][0] = se_a * se_a;
        covariance[1][1] = se_b * se_b;
        covariance[2][2] = se_c * se_c;
        Ok(Self {
            a: get("A")?,
            b: get("B")?,
            c: get("C")?,
            se_a,
            se_b,
            se_c,
            covariance,
            residual_rms: get("residual_rms")?,
            n_points: get("n_points")? as usize,
            domain: DomainBox {
                k_min: get("k_min")?,
                k_max: get("k_max")?,
                log2_nb_min: get("log2_nb_min")?,
                log2_nb_max: get("log2_nb_max")?,
            },
        })
    }

    pub const CSV_HEADER: [&'static str; 12] = [
        "A",
        "B",
        "C",
        "se_A",
        "se_B",
        "se_C",
        "residual_rms",
        "n_points",
        "k_min",
        "k_max",
        "log2_nb_min",
        "log2_nb_max",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        let d = &self.domain;
        [self.a, self.b, self.c, self.se_a, self.se_b, self.se_c, self.residual_rms]
            .iter()
            .map(|v| v.to_string())
            .chain(std::iter::once(self.n_points.to_string()))
            .chain([d.k_min, d.k_max, d.log2_nb_min, d.log2_nb_max].iter().map(|v| v.to_string()))
            .collect()
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Weighted least squares of `nc_mean` on `[1, k, log2_nb]`.
///
/// Standard errors scale the inverse normal matrix by the weighted residual
/// variance, so weights only need to be correct up to a common factor.
pub fn fit_scaling(points: &[ScalingPoint]) -> Result<ScalingFit> {
    if points.len() < 6 {
        return Err(Error::RankDeficient(format!("{} points, need at least 6", points.len())));
    }
    if points.iter().any(|p| !(p.weight > 0.0 && p.weight.is_finite()) || !p.nc_mean.is_finite()) {
        return Err(Error::Fit("weights must be positive and values finite".into()));
    }
    let nk = distinct(points.iter().map(|p| p.k));
    let nn = distinct(points.iter().map(|p| p.log2_nb));
    if nk < 2 || nn < 2 {
        return Err(Error::RankDeficient(format!("{nk} distinct k and {nn} distinct N_b values")));
    }
    let mut normal = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for p in points {
        let x = Vector3::new(1.0, p.k, p.log2_nb);
        normal += p.weight * x * x.transpose();
        rhs += p.weight * p.nc_mean * x;
    }
    let chol = normal
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("singular design matrix".into()))?;
    let beta = chol.solve(&rhs);
    let inverse = chol.inverse();

    let mut wss = 0.0;
    let mut ss = 0.0;
    for p in points {
        let r = p.nc_mean - (beta[0] + beta[1] * p.k + beta[2] * p.log2_nb);
        wss += p.weight * r * r;
        ss += r * r;
    }
    let dof = (points.len() - 3) as f64;
    let cov = inverse * (wss / dof);
    let mut covariance = [[0.0; 3]; 3];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = cov[(i, j)];
        }
    }
    let fold = |init: f64, f: fn(f64, f64) -> f64, get: fn(&ScalingPoint) -> f64| {
        points.iter().map(get).fold(init, f)
    };
    Ok(ScalingFit {
        a: beta[0],
        b: beta[1],
        c: beta[2],
        se_a: cov[(0, 0)].sqrt(),
        se_b: cov[(1, 1)].sqrt(),
        se_c: cov[(2, 2)].sqrt(),
        covariance,
        residual_rms: (ss / points.len() as f64).sqrt(),
        n_points: points.len(),
        domain: DomainBox {
            k_min: fold(f64::INFINITY, f64::min, |p| p.k),
            k_max: fold(f64::NEG_INFINITY, f64::max, |p| p.k),
            log2_nb_min: fold(f64::INFINITY, f64::min, |p| p.log2_nb),
            log2_nb_max: fold(f64::NEG_INFINITY, f64::max, |p| p.log2_nb),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisCrossing {
    pub k: f64,
    /// `log2 N_b` where the fitted `N_c` equals 1.
    pub log2_nb: f64,
    /// Delta-method standard error of `log2_nb`.
    pub std_err: f64,
    /// True when the crossing lies outside the fitted domain.
    pub extrapolated: bool,
}

/// Solve `A + B·k + C·x = 1` for `x`.
pub fn axis_crossing(fit: &ScalingFit, k: f64) -> Result<AxisCrossing> {
    if fit.c >= 0.0 {
        return Err(Error::NoCrossing(format!("C = {} is not negative", fit.c)));
    }
    let x = (1.0 - fit.a - fit.b * k) / fit.c;
    // gradient of x with respect to (a, b, c)
    let g = [-1.0 / fit.c, -k / fit.c, -x / fit.c];
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            var += g[i] * fit.covariance[i][j] * g[j];
        }
    }
    Ok(AxisCrossing {
        k,
        log2_nb: x,
        std_err: var.max(0.0).sqrt(),
        extrapolated: !fit.domain.contains(k, x),
    })
}

/// Ball-count multiplier that cancels one extra bit of precision at fixed
/// critical step: `2^(B/|C|)`.
pub fn precision_tradeoff(fit: &ScalingFit) -> Result<f64> {
    if !(fit.b > 0.0 && fit.c < 0.0) {
        return Err(Error::Domain(format!(
            "need B > 0 and C < 0, got B = {}, C = {}",
            fit.b, fit.c
        )));
    }
    Ok((fit.b / -fit.c).exp2())
}
