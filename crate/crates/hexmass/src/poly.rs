//! Trivariate polynomials in the natural coordinates (ξ, η, ζ) with exact
//! rational coefficients, and analytic integration over the reference cube
//! [-1,1]³.
//!
//! Terms are stored sparsely, keyed by exponent triple; the map keeps no zero
//! coefficients, and iteration order is lexicographic on (a, b, c) so every
//! emitted table is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::rational::{rat_int, rat_to_f64, Rational};

/// Exponent triple (a, b, c) for ξᵃ ηᵇ ζᶜ.
pub type Exponents = (u32, u32, u32);

/// A point in natural coordinates. Element-domain evaluation expects each
/// coordinate in [-1, +1], but the type does not enforce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalPoint {
    pub xi: f64,
    pub eta: f64,
    pub zeta: f64,
}

impl NaturalPoint {
    pub fn new(xi: f64, eta: f64, zeta: f64) -> Self {
        Self { xi, eta, zeta }
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.xi, self.eta, self.zeta]
    }

    pub fn in_reference_cube(&self, tol: f64) -> bool {
        self.as_array().iter().all(|c| c.abs() <= 1.0 + tol)
    }
}

impl From<[f64; 3]> for NaturalPoint {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for NaturalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.xi, self.eta, self.zeta)
    }
}

/// Sparse trivariate polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial3 {
    terms: BTreeMap<Exponents, Rational>,
}

impl Polynomial3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term((0, 0, 0), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(rat_int(1))
    }

    /// Single monomial `c · ξᵃηᵇζᶜ`.
    pub fn monomial(exp: Exponents, coeff: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn xi() -> Self {
        Self::monomial((1, 0, 0), rat_int(1))
    }

    pub fn eta() -> Self {
        Self::monomial((0, 1, 0), rat_int(1))
    }

    pub fn zeta() -> Self {
        Self::monomial((0, 0, 1), rat_int(1))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `coeff · ξᵃηᵇζᶜ`, dropping the term if it cancels to zero.
    pub fn add_term(&mut self, exp: Exponents, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Lexicographic term iteration.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: Exponents) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest exponent per variable, (0,0,0) for the zero polynomial.
    pub fn per_variable_degrees(&self) -> Exponents {
        let mut d = (0, 0, 0);
        for (a, b, c) in self.terms.keys() {
            d.0 = d.0.max(*a);
            d.1 = d.1.max(*b);
            d.2 = d.2.max(*c);
        }
        d
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b, c)| a + b + c).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * factor)).collect(),
        }
    }

    /// ∂/∂(variable `axis`), axis ∈ {0: ξ, 1: η, 2: ζ}.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < 3, "axis must be 0, 1 or 2");
        let mut out = Self::zero();
        for (&(a, b, c), coeff) in &self.terms {
            let mut exp = [a, b, c];
            let e = exp[axis];
            if e == 0 {
                continue;
            }
            exp[axis] -= 1;
            out.add_term((exp[0], exp[1], exp[2]), coeff * rat_int(e as i64));
        }
        out
    }

    /// Floating evaluation at a natural point.
    pub fn eval(&self, p: &NaturalPoint) -> f64 {
        let mut sum = 0.0;
        for (&(a, b, c), coeff) in &self.terms {
            sum += rat_to_f64(coeff)
                * p.xi.powi(a as i32)
                * p.eta.powi(b as i32)
                * p.zeta.powi(c as i32);
        }
        sum
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, p: &[Rational; 3]) -> Rational {
        let mut sum = Rational::zero();
        for (&(a, b, c), coeff) in &self.terms {
            let mut term = coeff.clone();
            for _ in 0..a {
                term *= &p[0];
            }
            for _ in 0..b {
                term *= &p[1];
            }
            for _ in 0..c {
                term *= &p[2];
            }
            sum += term;
        }
        sum
    }

    /// Term list with coefficients converted to `f64`, for hot evaluation
    /// loops that would otherwise re-convert per call.
    pub fn float_terms(&self) -> Vec<(Exponents, f64)> {
        self.terms.iter().map(|(e, c)| (*e, rat_to_f64(c))).collect()
    }
}

impl Add for &Polynomial3 {
    type Output = Polynomial3;
    fn add(self, rhs: &Polynomial3) -> Polynomial3 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Polynomial3 {
    type Output = Polynomial3;
    fn sub(self, rhs: &Polynomial3) -> Polynomial3 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial3 {
    type Output = Polynomial3;
    fn neg(self) -> Polynomial3 {
        Polynomial3 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &Polynomial3 {
    type Output = Polynomial3;
    fn mul(self, rhs: &Polynomial3) -> Polynomial3 {
        poly_mul(self, rhs)
    }
}

/// Coefficient-exact product; degrees add per variable.
pub fn poly_mul(p: &Polynomial3, q: &Polynomial3) -> Polynomial3 {
    let mut out = Polynomial3::zero();
    for (&(a1, b1, c1), x) in &p.terms {
        for (&(a2, b2, c2), y) in &q.terms {
            out.add_term((a1 + a2, b1 + b2, c1 + c2), x * y);
        }
    }
    out
}

/// ∫∫∫ ξᵃ ηᵇ ζᶜ dξ dη dζ over [-1,1]³: zero when any exponent is odd,
/// otherwise 8/((a+1)(b+1)(c+1)).
pub fn monomial_integral(a: u32, b: u32, c: u32) -> Rational {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return Rational::zero();
    }
    rat_int(8) / rat_int(((a + 1) * (b + 1) * (c + 1)) as i64)
}

/// Exact ∫ p dΩ over the reference cube.
pub fn integrate_cube(p: &Polynomial3) -> Rational {
    let mut sum = Rational::zero();
    for (&(a, b, c), coeff) in &p.terms {
        let m = monomial_integral(a, b, c);
        if !m.is_zero() {
            sum += coeff * m;
        }
    }
    sum
}

/// Canonical text form used by the density-expression printer: lexicographic
/// terms, variables named x, y, z (standing for ξ, η, ζ), rationals as n/d.
impl fmt::Display for Polynomial3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b, c), coeff) in &self.terms {
            let negative = coeff < &Rational::zero();
            let mag = if negative { -coeff.clone() } else { coeff.clone() };
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (var, e) in [("x", a), ("y", b), ("z", c)] {
                match e {
                    0 => {}
                    1 => factors.push(var.to_string()),
                    _ => factors.push(format!("{var}^{e}")),
                }
            }
            let coeff_str = if mag.denom() == &num_bigint::BigInt::from(1) {
                format!("{}", mag.numer())
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            if factors.is_empty() {
                write!(f, "{coeff_str}")?;
            } else if mag == rat_int(1) {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff_str, factors.join("*"))?;
            }
        }
        Ok(())
    }
}
