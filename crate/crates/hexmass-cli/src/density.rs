//! Density-expression grammar over x, y, z (standing for ξ, η, ζ).
//!
//! Signed terms separated by '+'/'-'; a term is a coefficient, a product of
//! variable powers, or both joined by '*': `1`, `0.5*x`, `x^2*y`, `3/4*z^2`.
//! Coefficients may be integers, decimals (with exponent) or `n/d` ratios;
//! all are parsed exactly. The canonical printer is `Polynomial3`'s `Display`,
//! which this grammar round-trips.

use hexmass::poly::Polynomial3;
use hexmass::rational::{rat_from_decimal_str, rat_int, Rational};

const MAX_DEGREE: u32 = 8;

pub fn parse_density(text: &str) -> Result<Polynomial3, String> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let poly = parser.expression()?;
    parser.skip_ws();
    if parser.pos != parser.chars.len() {
        return Err(format!(
            "unexpected character '{}' at position {}",
            parser.chars[parser.pos], parser.pos
        ));
    }
    let (dx, dy, dz) = poly.per_variable_degrees();
    if dx > MAX_DEGREE || dy > MAX_DEGREE || dz > MAX_DEGREE {
        return Err(format!(
            "per-variable degree must not exceed {MAX_DEGREE} (got x^{dx}, y^{dy}, z^{dz})"
        ));
    }
    Ok(poly)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expression(&mut self) -> Result<Polynomial3, String> {
        self.skip_ws();
        let mut sign = self.sign().unwrap_or(1);
        let mut poly = Polynomial3::zero();
        loop {
            let term = self.term()?;
            poly = if sign < 0 { &poly - &term } else { &poly + &term };
            self.skip_ws();
            match self.peek() {
                None => return Ok(poly),
                Some('+') | Some('-') | Some('\u{2212}') => {
                    sign = self.sign().expect("peeked a sign");
                }
                Some(c) => return Err(format!("expected '+' or '-', found '{c}' at position {}", self.pos)),
            }
        }
    }

    fn sign(&mut self) -> Option<i32> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(1)
            }
            // ASCII hyphen or the minus sign U+2212
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Some(-1)
            }
            _ => None,
        }
    }

    fn term(&mut self) -> Result<Polynomial3, String> {
        self.skip_ws();
        let start = self.pos;
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => Some(self.number()?),
            _ => None,
        };
        let mut exponents: [u32; 3] = [0, 0, 0];
        let mut have_factor = false;
        // After a coefficient every factor is '*'-joined; a bare-variable term
        // starts directly with its first factor.
        loop {
            self.skip_ws();
            let next_is_star = self.peek() == Some('*');
            let leading_var = !have_factor && coeff.is_none() && matches!(self.peek(), Some('x' | 'y' | 'z'));
            if next_is_star {
                self.bump();
                self.factor(&mut exponents)?;
                have_factor = true;
            } else if leading_var {
                self.factor(&mut exponents)?;
                have_factor = true;
            } else {
                break;
            }
        }
        if coeff.is_none() && !have_factor {
            return Err(format!("expected a term at position {start}"));
        }
        let coefficient = coeff.unwrap_or_else(|| rat_int(1));
        Ok(Polynomial3::monomial(
            (exponents[0], exponents[1], exponents[2]),
            coefficient,
        ))
    }

    fn factor(&mut self, exponents: &mut [u32; 3]) -> Result<(), String> {
        self.skip_ws();
        let axis = match self.bump() {
            Some('x') => 0,
            Some('y') => 1,
            Some('z') => 2,
            other => {
                return Err(format!(
                    "expected a variable (x, y or z), found {:?} at position {}",
                    other,
                    self.pos.saturating_sub(1)
                ))
            }
        };
        let mut power = 1u32;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.bump();
            self.skip_ws();
            let digits = self.digits()?;
            power = digits
                .parse()
                .map_err(|_| format!("invalid exponent '{digits}'"))?;
        }
        exponents[axis] += power;
        Ok(())
    }

    fn digits(&mut self) -> Result<String, String> {
        let mut out = String::new();
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            out.push(self.bump().unwrap());
        }
        if out.is_empty() {
            return Err(format!("expected digits at position {}", self.pos));
        }
        Ok(out)
    }

    /// Decimal literal with optional exponent, optionally followed by
    /// '/integer' for an exact ratio.
    fn number(&mut self) -> Result<Rational, String> {
        let mut literal = String::new();
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            literal.push(self.bump().unwrap());
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            literal.push(self.bump().unwrap());
            if matches!(self.peek(), Some('+' | '-')) {
                literal.push(self.bump().unwrap());
            }
            literal.push_str(&self.digits()?);
        }
        let numerator =
            rat_from_decimal_str(&literal).ok_or_else(|| format!("invalid number '{literal}'"))?;
        // A '/' directly followed by digits denotes an exact ratio.
        if self.peek() == Some('/') {
            let save = self.pos;
            self.bump();
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let denom_digits = self.digits()?;
                let denom = rat_from_decimal_str(&denom_digits)
                    .ok_or_else(|| format!("invalid denominator '{denom_digits}'"))?;
                if denom == rat_int(0) {
                    return Err("zero denominator".into());
                }
                return Ok(numerator / denom);
            }
            self.pos = save;
        }
        Ok(numerator)
    }
}
