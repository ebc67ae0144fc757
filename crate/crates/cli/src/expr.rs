//! Tiny complex-valued arithmetic for the reference data file.
//!
//! Grammar: `+ - * / ^`, parentheses, decimal literals, the imaginary unit
//! `i`, `sqrt(..)` (principal branch) and named variables. `^` is right
//! associative and binds tighter than unary minus, so `-2^2 = -4`.

use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot evaluate `{source_text}`: {message}")]
pub struct ExprError {
    pub source_text: String,
    pub message: String,
}

pub type Env = BTreeMap<String, Complex64>;

pub fn evaluate(text: &str, env: &Env) -> Result<Complex64, ExprError> {
    let mut p = Parser { chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, env };
    let fail = |message: String| ExprError { source_text: text.to_string(), message };
    let v = p.expr().map_err(fail)?;
    if p.pos != p.chars.len() {
        return Err(fail(format!("unexpected `{}` at offset {}", p.chars[p.pos], p.pos)));
    }
    Ok(v)
}

/// Evaluates and insists on a real result (imaginary part at roundoff level).
pub fn evaluate_real(text: &str, env: &Env) -> Result<f64, ExprError> {
    let z = evaluate(text, env)?;
    if z.im.abs() > 1e-12 * z.re.abs().max(1.0) {
        return Err(ExprError { source_text: text.into(), message: format!("value {z} is not real") });
    }
    Ok(z.re)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    env: &'a Env,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Complex64, String> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<Complex64, String> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64, String> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Complex64, String> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            return Ok(pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Complex64, String> {
        match self.peek() {
            None => Err("unexpected end of input".into()),
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(format!("missing `)` at offset {}", self.pos));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|e| format!("bad number `{s}`: {e}"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if self.eat('(') {
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(format!("missing `)` after {name}("));
                    }
                    return match name.as_str() {
                        "sqrt" => Ok(principal(arg).sqrt()),
                        _ => Err(format!("unknown function `{name}`")),
                    };
                }
                match name.as_str() {
                    "i" => Ok(Complex64::new(0.0, 1.0)),
                    _ => self.env.get(&name).copied().ok_or_else(|| format!("unknown variable `{name}`")),
                }
            }
            Some(c) => Err(format!("unexpected `{c}` at offset {}", self.pos)),
        }
    }
}

/// Principal power; real bases and exponents stay in real arithmetic where
/// that is exact, so `3^(-1/2)` is not perturbed by a complex log.
// Unary minus leaves a signed zero in the imaginary part, which would put
// `sqrt(-4)` on the wrong side of the branch cut.
fn principal(z: Complex64) -> Complex64 {
    Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im })
}

fn pow(base: Complex64, e: Complex64) -> Complex64 {
    let (base, e) = (principal(base), principal(e));
    if base.im == 0.0 && e.im == 0.0 {
        if base.re > 0.0 {
            return Complex64::new(base.re.powf(e.re), 0.0);
        }
        if e.re.fract() == 0.0 {
            return Complex64::new(base.re.powi(e.re as i32), 0.0);
        }
    }
    base.powc(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str) -> Complex64 {
        let mut env = Env::new();
        env.insert("alpha".into(), Complex64::new(2.0, 0.0));
        evaluate(s, &env).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("1+2*3"), Complex64::new(7.0, 0.0));
        assert_eq!(eval("-2^2"), Complex64::new(-4.0, 0.0));
        assert_eq!(eval("2^3^2"), Complex64::new(512.0, 0.0));
        assert_eq!(eval("2^-1"), Complex64::new(0.5, 0.0));
        assert_eq!(eval("(1+alpha)/alpha"), Complex64::new(1.5, 0.0));
    }

    #[test]
    fn complex_values() {
        assert_eq!(eval("sqrt(-4)"), Complex64::new(0.0, 2.0));
        assert_eq!(eval("i*i"), Complex64::new(-1.0, 0.0));
        let z = eval("(-1/3)^(1/4)");
        let expect = Complex64::from_polar((1.0f64 / 3.0).powf(0.25), std::f64::consts::FRAC_PI_4);
        assert!((z - expect).norm() < 1e-15);
    }

    #[test]
    fn errors_are_reported() {
        assert!(evaluate("1+", &Env::new()).is_err());
        assert!(evaluate("foo", &Env::new()).is_err());
        assert!(evaluate("cos(1)", &Env::new()).is_err());
        assert!(evaluate("(1", &Env::new()).is_err());
        assert!(evaluate_real("sqrt(-1)", &Env::new()).is_err());
    }
}
