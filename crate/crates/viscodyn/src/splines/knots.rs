use crate::Error;

/// Open knot vector on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

/// Non-zero basis functions at a parametric point.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisEval {
    /// Knot span index `s` with `ξ_s ≤ ξ < ξ_{s+1}`; functions `s-p ..= s` are active.
    pub span: usize,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl KnotVector {
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self, Error> {
        let p = degree;
        if knots.len() < 2 * (p + 1) {
            return Err(Error::Config(format!(
                "knot vector of degree {p} needs at least {} knots",
                2 * (p + 1)
            )));
        }
        if knots.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::Config("knots must be non-decreasing".into()));
        }
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        if first != 0.0 || last != 1.0 {
            return Err(Error::Config("knots must span [0, 1]".into()));
        }
        let n_first = knots.iter().take_while(|&&k| k == first).count();
        let n_last = knots.iter().rev().take_while(|&&k| k == last).count();
        if n_first != p + 1 || n_last != p + 1 {
            return Err(Error::Config(format!(
                "end knots must be repeated exactly {} times",
                p + 1
            )));
        }
        let max_interior = p.max(1);
        let mut i = n_first;
        while i < knots.len() - n_last {
            let m = knots[i..].iter().take_while(|&&k| k == knots[i]).count();
            if m > max_interior {
                return Err(Error::Config(format!(
                    "interior knot {} has multiplicity {m} > {max_interior}",
                    knots[i]
                )));
            }
            i += m;
        }
        Ok(Self { degree, knots })
    }

    /// Open knot vector with the given distinct breakpoints (including 0 and 1)
    /// and interior multiplicities.
    pub fn from_breakpoints(degree: usize, breaks: &[f64], interior_mult: &[usize]) -> Result<Self, Error> {
        if breaks.len() < 2 || interior_mult.len() != breaks.len() - 2 {
            return Err(Error::Config("breakpoint/multiplicity mismatch".into()));
        }
        let mut knots = vec![breaks[0]; degree + 1];
        for (b, &m) in breaks[1..breaks.len() - 1].iter().zip(interior_mult) {
            knots.extend(std::iter::repeat(*b).take(m));
        }
        knots.extend(std::iter::repeat(breaks[breaks.len() - 1]).take(degree + 1));
        Self::new(degree, knots)
    }

    /// Uniform open knot vector with `elements` spans and maximal continuity.
    pub fn uniform(degree: usize, elements: usize) -> Result<Self, Error> {
        let breaks: Vec<f64> = (0..=elements).map(|i| i as f64 / elements as f64).collect();
        Self::from_breakpoints(degree, &breaks, &vec![1; elements.saturating_sub(1)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions.
    pub fn dim(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct knot values in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = Vec::new();
        for &k in &self.knots {
            if b.last() != Some(&k) {
                b.push(k);
            }
        }
        b
    }

    pub fn multiplicity(&self, x: f64) -> usize {
        self.knots.iter().filter(|&&k| k == x).count()
    }

    /// Span indices of the non-empty knot intervals.
    pub fn spans(&self) -> Vec<usize> {
        (self.degree..self.dim())
            .filter(|&s| self.knots[s] < self.knots[s + 1])
            .collect()
    }

    /// Greville abscissae.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.dim())
            .map(|i| {
                if p == 0 {
                    0.5 * (self.knots[i] + self.knots[i + 1])
                } else {
                    self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64
                }
            })
            .collect()
    }

    pub fn find_span(&self, xi: f64) -> Result<usize, Error> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain(xi));
        }
        let n = self.dim();
        let p = self.degree;
        if xi >= self.knots[n] {
            return Ok(n - 1);
        }
        let (mut lo, mut hi) = (p, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if xi < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo)
    }

    pub fn eval(&self, xi: f64) -> Result<BasisEval, Error> {
        let span = self.find_span(xi)?;
        let mut values = vec![0.0; self.degree + 1];
        let mut derivs = vec![0.0; self.degree + 1];
        self.eval_in_span(span, xi, &mut values, &mut derivs);
        Ok(BasisEval { span, values, derivs })
    }

    /// Values and first derivatives of the `p+1` functions of `span` at `xi`,
    /// continued polynomially if `xi` lies outside the span.
    pub fn eval_in_span(&self, span: usize, xi: f64, values: &mut [f64], derivs: &mut [f64]) {
        let p = self.degree;
        let u = &self.knots;
        if p == 0 {
            values[0] = 1.0;
            derivs[0] = 0.0;
            return;
        }
        let mut lower = vec![0.0; p];
        cox_de_boor(u, span, xi, p - 1, &mut lower);
        cox_de_boor(u, span, xi, p, values);
        for r in 0..=p {
            let i = span - p + r;
            let mut d = 0.0;
            if r >= 1 {
                let den = u[i + p] - u[i];
                if den > 0.0 {
                    d += lower[r - 1] / den;
                }
            }
            if r < p {
                let den = u[i + p + 1] - u[i + 1];
                if den > 0.0 {
                    d -= lower[r] / den;
                }
            }
            derivs[r] = p as f64 * d;
        }
    }
}

/// Triangular Cox–de Boor evaluation of the `q+1` degree-`q` functions that
/// are non-zero on `span`.
fn cox_de_boor(u: &[f64], span: usize, xi: f64, q: usize, out: &mut [f64]) {
    let mut left = vec![0.0; q + 1];
    let mut right = vec![0.0; q + 1];
    out[0] = 1.0;
    for j in 1..=q {
        left[j] = xi - u[span + 1 - j];
        right[j] = u[span + j] - xi;
        let mut saved = 0.0;
        for r in 0..j {
            let den = right[r + 1] + left[j - r];
            let temp = if den != 0.0 { out[r] / den } else { 0.0 };
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

/// Gauss–Legendre points and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pts = vec![0.0; n];
    let mut wts = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        pts[n - 1 - i] = 0.5 * (1.0 + x);
        wts[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (pts, wts)
}
