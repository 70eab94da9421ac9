//! Exact rational evaluation of the closed-form fold bounds.
//!
//! The N-fold optima A_N and the low-range s_EC are rational functions, so
//! they admit exact evaluation at rational arguments; tests use these as
//! oracles. Derivatives are taken with rational dual numbers, which keeps
//! the differentiation itself exact.

use num::rational::Ratio;

pub type Rational = Ratio<i64>;

/// Dual number a + b eps over the rationals, eps^2 = 0. Arithmetic on the
/// first component evaluates the function, on the second its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatDual {
    pub val: Rational,
    pub d: Rational,
}

impl RatDual {
    pub fn variable(at: Rational) -> Self {
        Self {
            val: at,
            d: Rational::from_integer(1),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self {
            val: c,
            d: Rational::from_integer(0),
        }
    }

    fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c))
    }
}

impl std::ops::Add for RatDual {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            val: self.val + rhs.val,
            d: self.d + rhs.d,
        }
    }
}

impl std::ops::Sub for RatDual {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            val: self.val - rhs.val,
            d: self.d - rhs.d,
        }
    }
}

impl std::ops::Mul for RatDual {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            val: self.val * rhs.val,
            d: self.d * rhs.val + self.val * rhs.d,
        }
    }
}

impl std::ops::Div for RatDual {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self {
            val: self.val / rhs.val,
            d: (self.d * rhs.val - self.val * rhs.d) / (rhs.val * rhs.val),
        }
    }
}

fn a_n_dual(a: RatDual, n: u32) -> RatDual {
    let two = RatDual::int(2);
    let one = RatDual::int(1);
    match n {
        1 => two + (a - two) / two,
        2 => two + (a - two) * (a + one) / (RatDual::int(3) * a + one),
        3 => {
            two + (a - two) * (a + one) * (a + two)
                / (RatDual::int(4) * (a * a + a + one))
        }
        _ => panic!("closed form only known for N in {{1, 2, 3}}, got {n}"),
    }
}

/// Exact A_N(a) at a rational argument a > 2.
pub fn a_n_rational(a: Rational, n: u32) -> Rational {
    a_n_dual(RatDual::constant(a), n).val
}

/// Exact derivative A_N'(a) at a rational argument.
pub fn a_n_derivative(a: Rational, n: u32) -> Rational {
    a_n_dual(RatDual::variable(a), n).d
}

/// Exact s_EC(a) = a(3a-1)/(a^2+2a-1), valid for 1 <= a <= 4.2360....
pub fn s_ec_rational(a: Rational) -> Rational {
    let one = Rational::from_integer(1);
    let three = Rational::from_integer(3);
    let two = Rational::from_integer(2);
    a * (three * a - one) / (a * a + two * a - one)
}

/// Exact fold point u_0(a) = a(2a-1)/(a^2+2a-1) behind the s_EC closed form.
pub fn s_ec_fold_point_rational(a: Rational) -> Rational {
    let one = Rational::from_integer(1);
    let two = Rational::from_integer(2);
    a * (two * a - one) / (a * a + two * a - one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn exact_values_match_float_forms() {
        for (a_num, a_den) in [(5, 2), (3, 1), (4, 1), (21, 5)] {
            let a = rat(a_num, a_den);
            let af = a_num as f64 / a_den as f64;
            for n in 1..=3 {
                let exact = a_n_rational(a, n);
                let float = crate::folding::closed_form_a_n(af, n);
                let exact_f = *exact.numer() as f64 / *exact.denom() as f64;
                assert!((exact_f - float).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_at_two() {
        let two = Rational::from_integer(2);
        assert_eq!(a_n_derivative(two, 1), rat(1, 2));
        assert_eq!(a_n_derivative(two, 2), rat(3, 7));
        assert_eq!(a_n_derivative(two, 3), rat(3, 7));
    }

    #[test]
    fn s_ec_exact_values() {
        assert_eq!(s_ec_rational(rat(2, 1)), rat(10, 7));
        assert_eq!(s_ec_rational(rat(4, 1)), rat(44, 23));
        assert_eq!(s_ec_fold_point_rational(rat(2, 1)), rat(6, 7));
        assert_eq!(s_ec_fold_point_rational(rat(4, 1)), rat(28, 23));
    }
}
