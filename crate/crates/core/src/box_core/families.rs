//! Constructors for the named box families.
//!
//! Variable names are fixed: `B_n` style boxes use `x1..x{n-1}`, `X` on
//! Alice's side and `y`, `Y` on Bob's; RAC boxes use `a0..a{n-1}`, `A` on
//! Alice's side and `A'`, `b`, `B` on Bob's.

use num_traits::Zero;

use super::{BipartiteBox, BoxError, BoxSignature, Variable};
use crate::rational::{ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

/// Off-branch behaviour of a RAC box (what happens when `A' != A`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RbVariant {
    /// Bits only: `B = a_b ⊕ A ⊕ A'` on every input.
    NoSignaling,
    /// Bits only: `B` is a fair coin whenever `A' != A`.
    SignalingHalf,
    /// `B = a_b - A + A' (mod d)`.
    Plus,
    /// `B = a_b + A - A' (mod d)`.
    Minus,
    /// `B` uniform over the `d - 1` symbols other than `a_b` whenever `A' != A`.
    Three,
}

impl RbVariant {
    pub const ALL: [RbVariant; 5] = [
        RbVariant::NoSignaling,
        RbVariant::SignalingHalf,
        RbVariant::Plus,
        RbVariant::Minus,
        RbVariant::Three,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RbVariant::NoSignaling => "no-signaling",
            RbVariant::SignalingHalf => "signaling-half",
            RbVariant::Plus => "plus",
            RbVariant::Minus => "minus",
            RbVariant::Three => "three",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        RbVariant::ALL.into_iter().find(|v| v.as_str() == s)
    }

    pub fn supports(self, d: usize) -> bool {
        match self {
            RbVariant::NoSignaling | RbVariant::SignalingHalf => d == 2,
            RbVariant::Plus | RbVariant::Minus | RbVariant::Three => d >= 2,
        }
    }
}

fn bn_signature(n: usize, d: usize) -> BoxSignature {
    BoxSignature::new(
        (1..n).map(|i| Variable::new(format!("x{i}"), d)).collect(),
        vec![Variable::new("X", d)],
        vec![Variable::new("y", n)],
        vec![Variable::new("Y", d)],
    )
    .expect("fixed names are unique")
}

fn rb_signature(n: usize, d: usize) -> BoxSignature {
    BoxSignature::new(
        (0..n).map(|i| Variable::new(format!("a{i}"), d)).collect(),
        vec![Variable::new("A", d)],
        vec![Variable::new("A'", d), Variable::new("b", n)],
        vec![Variable::new("B", d)],
    )
    .expect("fixed names are unique")
}

/// The `B_n` box: `P(X, Y | x_1..x_{n-1}, y) = 1/2` iff `X ⊕ Y = x_y`
/// with `x_0 = 0`. For `n = 2` this is the PR box.
pub fn make_bn_box(n: usize) -> Result<BipartiteBox, BoxError> {
    make_bnd_box(n, 2, Sign::Plus)
}

/// The `B_n^d(±)` box: uniform `1/d` on `X ± Y ≡ x_y (mod d)`, `x_0 = 0`.
pub fn make_bnd_box(n: usize, d: usize, sign: Sign) -> Result<BipartiteBox, BoxError> {
    if n < 2 {
        return Err(BoxError::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if d < 2 {
        return Err(BoxError::InvalidParameter(format!("d must be >= 2, got {d}")));
    }
    let weight = ratio(1, d as i64);
    Ok(BipartiteBox::from_fn(bn_signature(n, d), |xs, y, ao, bo| {
        let x_y = if y[0] == 0 { 0 } else { xs[y[0] - 1] };
        let combined = match sign {
            Sign::Plus => (ao[0] + bo[0]) % d,
            Sign::Minus => (ao[0] + d - bo[0]) % d,
        };
        if combined == x_y {
            weight
        } else {
            Rational::zero()
        }
    }))
}

/// An `(n→1, d)` RAC box. Alice's output `A` is uniform and independent of
/// her inputs; when `A' = A` Bob's output is `a_b`. The variant fixes the
/// off-branch.
pub fn make_rb(n: usize, d: usize, variant: RbVariant) -> Result<BipartiteBox, BoxError> {
    if n < 2 {
        return Err(BoxError::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if d < 2 || !variant.supports(d) {
        return Err(BoxError::InvalidParameter(format!(
            "variant {} does not support d = {d}",
            variant.as_str()
        )));
    }
    let p_a = ratio(1, d as i64);
    Ok(BipartiteBox::from_fn(rb_signature(n, d), |a, bob_in, ao, bo| {
        let (big_a, a_prime, b, big_b) = (ao[0], bob_in[0], bob_in[1], bo[0]);
        let target = a[b];
        // P(B | a, A, A', b); A itself carries weight 1/d.
        let conditional = if big_a == a_prime {
            if big_b == target {
                ratio(1, 1)
            } else {
                Rational::zero()
            }
        } else {
            match variant {
                RbVariant::NoSignaling | RbVariant::Plus => {
                    indicator(big_b == (target + d - big_a + a_prime) % d)
                }
                RbVariant::Minus => indicator(big_b == (target + big_a + d - a_prime) % d),
                RbVariant::SignalingHalf => ratio(1, 2),
                RbVariant::Three => {
                    if big_b == target {
                        Rational::zero()
                    } else {
                        ratio(1, (d - 1) as i64)
                    }
                }
            }
        };
        p_a * conditional
    }))
}

fn indicator(cond: bool) -> Rational {
    if cond {
        ratio(1, 1)
    } else {
        Rational::zero()
    }
}
