//! Homogeneous isotropic media: vacuum, constant permittivity, and tabulated
//! permittivity interpolated with a shape-preserving cubic on log-frequency.
//! Permeability is unity in every supported model.

use num_complex::Complex64;

use super::GreenError;

/// Dispersion model of the embedding medium together with the speed of light
/// in the unit system in use (c is a plain number here; the CLI boundary
/// fixes it when converting from SI).
#[derive(Debug, Clone)]
pub struct Medium {
    model: MediumModel,
    c: f64,
}

#[derive(Debug, Clone)]
pub enum MediumModel {
    Vacuum,
    Constant { epsilon: f64 },
    Tabulated(PermittivityTable),
}

impl Medium {
    pub fn vacuum() -> Self {
        Medium { model: MediumModel::Vacuum, c: 1.0 }
    }

    /// Constant real permittivity; must be ≥ 1 so that ε(iξ) ≥ 1 holds.
    pub fn constant(epsilon: f64) -> Result<Self, GreenError> {
        if !(epsilon >= 1.0) || !epsilon.is_finite() {
            return Err(GreenError::InvalidPermittivity(epsilon));
        }
        Ok(Medium { model: MediumModel::Constant { epsilon }, c: 1.0 })
    }

    pub fn tabulated(table: PermittivityTable) -> Self {
        Medium { model: MediumModel::Tabulated(table), c: 1.0 }
    }

    pub fn with_speed_of_light(mut self, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "speed of light must be positive");
        self.c = c;
        self
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn model(&self) -> &MediumModel {
        &self.model
    }

    /// ε at complex frequency.  Only the real axis is available for tabulated
    /// data; analytic continuation of a lossy table is out of scope.
    pub fn epsilon(&self, z: Complex64) -> Result<Complex64, GreenError> {
        match &self.model {
            MediumModel::Vacuum => Ok(Complex64::new(1.0, 0.0)),
            MediumModel::Constant { epsilon } => Ok(Complex64::new(*epsilon, 0.0)),
            MediumModel::Tabulated(table) => {
                if z.im != 0.0 {
                    return Err(GreenError::UnsupportedOnImaginaryAxis);
                }
                table.epsilon(z.re.abs())
            }
        }
    }

    pub fn mu(&self, _z: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    /// n = √(εμ), principal branch (Im n ≥ 0 for passive media on the real
    /// axis).
    pub fn refractive_index(&self, z: Complex64) -> Result<Complex64, GreenError> {
        Ok((self.epsilon(z)? * self.mu(z)).sqrt())
    }

    /// Wave vector k = n·ω/c.
    pub fn wavevector(&self, z: Complex64) -> Result<Complex64, GreenError> {
        Ok(self.refractive_index(z)? * z / self.c)
    }

    /// Whether ε(iξ) can be evaluated (needed by every Wick-rotated integral).
    pub fn supports_imaginary_axis(&self) -> bool {
        !matches!(self.model, MediumModel::Tabulated(_))
    }

    /// Real, non-dispersive index (vacuum or constant); lossless requirement
    /// of the coincidence limit.
    pub fn lossless_index(&self) -> Result<f64, GreenError> {
        match &self.model {
            MediumModel::Vacuum => Ok(1.0),
            MediumModel::Constant { epsilon } => Ok(epsilon.sqrt()),
            MediumModel::Tabulated(_) => {
                Err(GreenError::UnsupportedModel("tabulated media are treated as lossy".into()))
            }
        }
    }

    /// Static index used for scale estimates (falls back to 1 for tables).
    pub fn static_index(&self) -> f64 {
        match &self.model {
            MediumModel::Vacuum => 1.0,
            MediumModel::Constant { epsilon } => epsilon.sqrt(),
            MediumModel::Tabulated(_) => 1.0,
        }
    }
}

/// Complex permittivity samples on a strictly increasing frequency grid,
/// interpolated component-wise with a monotone cubic in log-frequency.
/// Evaluation outside the grid is an error, never an extrapolation.
#[derive(Debug, Clone)]
pub struct PermittivityTable {
    ln_omega: Vec<f64>,
    re: Pchip,
    im: Pchip,
    omega_min: f64,
    omega_max: f64,
}

impl PermittivityTable {
    /// Parse the plain-text format: one `ω  Re ε  Im ε` triple per line,
    /// `#` starts a comment, frequencies strictly increasing and positive.
    pub fn parse(text: &str) -> Result<Self, GreenError> {
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(GreenError::InvalidTable(format!(
                    "line {}: expected `omega re_eps im_eps`, got {} field(s)",
                    lineno + 1,
                    fields.len()
                )));
            }
            let mut vals = [0.0f64; 3];
            for (v, s) in vals.iter_mut().zip(&fields) {
                *v = s.parse().map_err(|_| {
                    GreenError::InvalidTable(format!("line {}: cannot parse `{s}`", lineno + 1))
                })?;
            }
            let (w, re, im) = (vals[0], vals[1], vals[2]);
            if !(w > 0.0) || !w.is_finite() {
                return Err(GreenError::InvalidTable(format!(
                    "line {}: frequency must be positive, got {w:e}",
                    lineno + 1
                )));
            }
            if im < 0.0 {
                return Err(GreenError::InvalidTable(format!(
                    "line {}: Im ε must be ≥ 0 (passive medium), got {im:e}",
                    lineno + 1
                )));
            }
            if let Some(&(prev, _, _)) = rows.last() {
                if w <= prev {
                    return Err(GreenError::InvalidTable(format!(
                        "line {}: frequencies must be strictly increasing ({w:e} after {prev:e})",
                        lineno + 1
                    )));
                }
            }
            rows.push((w, re, im));
        }
        if rows.len() < 2 {
            return Err(GreenError::InvalidTable(format!(
                "need at least 2 samples, got {}",
                rows.len()
            )));
        }
        let ln_omega: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
        let re = Pchip::new(&ln_omega, &rows.iter().map(|r| r.1).collect::<Vec<_>>());
        let im = Pchip::new(&ln_omega, &rows.iter().map(|r| r.2).collect::<Vec<_>>());
        Ok(PermittivityTable {
            omega_min: rows[0].0,
            omega_max: rows[rows.len() - 1].0,
            ln_omega,
            re,
            im,
        })
    }

    /// Rescale the frequency grid (unit conversion at the boundary).
    pub fn scale_frequencies(mut self, factor: f64) -> Self {
        assert!(factor > 0.0 && factor.is_finite());
        let lf = factor.ln();
        for x in &mut self.ln_omega {
            *x += lf;
        }
        self.re.shift_x(lf);
        self.im.shift_x(lf);
        self.omega_min *= factor;
        self.omega_max *= factor;
        self
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega_min, self.omega_max)
    }

    pub fn epsilon(&self, omega: f64) -> Result<Complex64, GreenError> {
        if !(omega >= self.omega_min && omega <= self.omega_max) {
            return Err(GreenError::OutsideTable {
                omega,
                min: self.omega_min,
                max: self.omega_max,
            });
        }
        let x = omega.ln();
        Ok(Complex64::new(self.re.eval(x), self.im.eval(x)))
    }
}

/// Fritsch–Carlson shape-preserving cubic Hermite interpolant.
#[derive(Debug, Clone)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && n == y.len());
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = h.iter().zip(y.windows(2)).map(|(h, w)| (w[1] - w[0]) / h).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = slope[0];
            d[1] = slope[0];
        } else {
            for i in 1..n - 1 {
                if slope[i - 1] * slope[i] <= 0.0 {
                    d[i] = 0.0;
                } else {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
                }
            }
            d[0] = Self::edge(h[0], h[1], slope[0], slope[1]);
            d[n - 1] = Self::edge(h[n - 2], h[n - 3], slope[n - 2], slope[n - 3]);
        }
        Pchip { x: x.to_vec(), y: y.to_vec(), d }
    }

    // One-sided three-point estimate, clamped to preserve shape.
    fn edge(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
        let mut d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if d * s0 <= 0.0 {
            d = 0.0;
        } else if s0 * s1 < 0.0 && d.abs() > 3.0 * s0.abs() {
            d = 3.0 * s0;
        }
        d
    }

    fn shift_x(&mut self, dx: f64) {
        for x in &mut self.x {
            *x += dx;
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.y[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h * h10 * self.d[i] + h01 * self.y[i + 1] + h * h11 * self.d[i + 1]
    }
}
