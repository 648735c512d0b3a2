//! Big-integer binomials and multinomials.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn central_binomial(k: u64) -> BigInt {
    binomial(2 * k, k)
}

/// `(Σ parts)! / Π parts!`, built as a product of binomials.
pub fn multinomial(parts: &[u64]) -> BigInt {
    let mut total = 0u64;
    let mut acc = BigInt::one();
    for &part in parts {
        total += part;
        acc *= binomial(total, part);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(central_binomial(3), BigInt::from(20));
        assert_eq!(multinomial(&[1, 1, 1, 1]), BigInt::from(24));
        assert_eq!(multinomial(&[]), BigInt::one());
        assert_eq!(multinomial(&[2, 0, 3]), factorial(5) / (factorial(2) * factorial(3)));
    }
}
