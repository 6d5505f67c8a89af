//! Number theory for biquadratic fields: Legendre symbols, decomposition
//! group cyclicity at ramified primes, and the Tate-Shafarevich group of the
//! norm-one torus of Q(sqrt(a), sqrt(b)) over Q.
//!
//! The global argument implemented here: Sha^1 is the kernel of H^1(G, T^)
//! restricted to every decomposition group.  Decomposition groups at
//! unramified places are cyclic, and by Chebotarev every cyclic subgroup
//! occurs, so the unramified local conditions cut H^1 down to the
//! "cyclic-locally-trivial" kernel computed lattice-theoretically by
//! `gmodule::sha_omega`.  Ramified primes contribute extra conditions only
//! when their decomposition group is the full Klein group: in that case the
//! local restriction is injective on the surviving classes and Sha^1 is
//! trivial.  An odd prime p dividing a is ramified with decomposition group
//! generated by inertia (the involution fixing sqrt(b)) together with the
//! Frobenius of the residue extension; the group stays cyclic exactly when
//! sqrt(b) is a p-adic unit square, i.e. when legendre(b, p) = 1.

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::gmodule::{augmentation_ideal, sha_omega, FiniteGroup};
use crate::zlattice::AbelianGroupInvariants;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
}

/// The Legendre symbol (n/p) by Euler's criterion.
pub fn legendre(n: i64, p: i64) -> Result<i64, ArithError> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    let base = BigInt::from(n.rem_euclid(p));
    let modulus = BigInt::from(p);
    let e = modulus.clone() - 1 >> 1;
    let r = base.modpow(&e, &modulus);
    if r == BigInt::from(0) {
        Ok(0)
    } else if r == BigInt::from(1) {
        Ok(1)
    } else {
        debug_assert_eq!(r, modulus - 1);
        Ok(-1)
    }
}

fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of |n|, by trial division (inputs are desk-scale).
fn prime_factors(n: i64) -> Vec<i64> {
    let mut n = n.abs();
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_squarefree(n: i64) -> bool {
    let n = n.abs();
    if n == 0 {
        return false;
    }
    let mut d = 2;
    let mut m = n;
    while d * d <= m {
        if m % (d * d) == 0 {
            return false;
        }
        if m % d == 0 {
            m /= d;
        }
        d += 1;
    }
    true
}

/// The biquadratic field Q(sqrt(a), sqrt(b)).
///
/// The supported domain is a, b squarefree, distinct, coprime, both
/// congruent to 1 mod 4 (which keeps the prime 2 unramified and out of the
/// decomposition analysis).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiquadraticField {
    pub a: i64,
    pub b: i64,
}

impl BiquadraticField {
    pub fn new(a: i64, b: i64) -> Result<Self, ArithError> {
        for x in [a, b] {
            if x == 1 || !is_squarefree(x) {
                return Err(ArithError::UnsupportedField(format!(
                    "{x} is not a squarefree integer different from 1"
                )));
            }
            if x.rem_euclid(4) != 1 {
                return Err(ArithError::UnsupportedField(format!(
                    "{x} is not congruent to 1 mod 4 (the prime 2 analysis is not implemented)"
                )));
            }
        }
        if a == b {
            return Err(ArithError::UnsupportedField(
                "the two radicands coincide".into(),
            ));
        }
        if a.gcd(&b) != 1 {
            return Err(ArithError::UnsupportedField(format!(
                "radicands {a} and {b} share the factor {}",
                a.gcd(&b)
            )));
        }
        Ok(BiquadraticField { a, b })
    }
}

/// Decomposition-group record of one ramified odd prime.
#[derive(Clone, Debug)]
pub struct PrimeRecord {
    pub prime: i64,
    /// Which radicand the prime divides ("a" or "b").
    pub divides: &'static str,
    /// Legendre symbol of the other radicand at this prime.
    pub legendre: i64,
    /// Whether the decomposition group is cyclic.
    pub cyclic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShaMethod {
    /// Every ramified decomposition group is cyclic: Sha^1 equals the
    /// cyclic-locally-trivial kernel Sha_omega computed by gmodule.
    AllCyclicDecomposition,
    /// Some ramified prime has the full Klein group as decomposition
    /// group; its local condition kills everything.
    NoncyclicDecompositionFound,
}

#[derive(Clone, Debug)]
pub struct ShaResult {
    pub field: BiquadraticField,
    pub group: AbelianGroupInvariants,
    pub method: ShaMethod,
    pub details: Vec<PrimeRecord>,
}

/// Sha^1 of the norm-one torus of Q(sqrt(a), sqrt(b)) over Q.
///
/// The lattice handed to `sha_omega` is the augmentation ideal of the Klein
/// group itself — the cocharacter lattice of the norm-one torus, which is
/// also the lattice of the torus's fan.  (Its dual has trivial degree-one
/// Sha_omega; the classical Z/2 lives on this side of the duality.)
pub fn sha_norm_one_biquadratic(f: &BiquadraticField) -> Result<ShaResult, ArithError> {
    let mut details = vec![];
    for (radicand, other, name) in [(f.a, f.b, "a"), (f.b, f.a, "b")] {
        for p in prime_factors(radicand) {
            let sym = legendre(other, p)?;
            details.push(PrimeRecord {
                prime: p,
                divides: name,
                legendre: sym,
                cyclic: sym == 1,
            });
        }
    }
    let all_cyclic = details.iter().all(|r| r.cyclic);
    let (method, group) = if all_cyclic {
        let lattice = augmentation_ideal(&FiniteGroup::klein_four());
        (ShaMethod::AllCyclicDecomposition, sha_omega(&lattice))
    } else {
        (
            ShaMethod::NoncyclicDecompositionFound,
            AbelianGroupInvariants { free_rank: 0, torsion: vec![] },
        )
    };
    assert!(
        group.is_trivial()
            || (group.free_rank == 0 && group.torsion == vec![BigInt::from(2)]),
        "internal error: Sha of a biquadratic norm-one torus is trivial or Z/2"
    );
    Ok(ShaResult { field: *f, group, method, details })
}

/// The unramified Tate-Shafarevich group Zhe, canonically isomorphic to
/// Sha^1 over a number field; this is the gate used by the no-rational-point
/// certificate.
pub fn zhe_of_norm_one(f: &BiquadraticField) -> Result<ShaResult, ArithError> {
    sha_norm_one_biquadratic(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmodule::GLattice;

    fn z2() -> Vec<BigInt> {
        vec![BigInt::from(2)]
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(29, 5).unwrap(), 1);
        assert_eq!(legendre(5, 29).unwrap(), 1);
        assert_eq!(legendre(13, 5).unwrap(), -1);
        assert_eq!(legendre(5, 5).unwrap(), 0);
        assert_eq!(legendre(-1, 5).unwrap(), 1);
        assert_eq!(legendre(-1, 7).unwrap(), -1);
        assert!(matches!(legendre(3, 4), Err(ArithError::NotOddPrime(4))));
        assert!(matches!(legendre(3, 2), Err(ArithError::NotOddPrime(2))));
        assert!(matches!(legendre(3, 9), Err(ArithError::NotOddPrime(9))));
    }

    #[test]
    fn field_validation() {
        assert!(BiquadraticField::new(5, 29).is_ok());
        assert!(BiquadraticField::new(-3, 5).is_ok());
        assert!(BiquadraticField::new(1, 5).is_err());
        assert!(BiquadraticField::new(45, 29).is_err()); // 45 = 9 * 5
        assert!(BiquadraticField::new(7, 5).is_err()); // 7 = 3 mod 4
        assert!(BiquadraticField::new(5, 5).is_err());
        assert!(BiquadraticField::new(65, 13).is_err()); // share 13
    }

    #[test]
    fn paper_example_has_sha_z2() {
        let f = BiquadraticField::new(5, 29).unwrap();
        let r = sha_norm_one_biquadratic(&f).unwrap();
        assert_eq!(r.method, ShaMethod::AllCyclicDecomposition);
        assert_eq!(r.group.free_rank, 0);
        assert_eq!(r.group.torsion, z2());
        assert_eq!(r.details.len(), 2);
        assert!(r.details.iter().all(|p| p.cyclic));
    }

    #[test]
    fn noncyclic_decomposition_kills_sha() {
        // 13 = 3 mod 5 is a non-residue: the decomposition group at 5 is
        // the whole Klein group
        let f = BiquadraticField::new(5, 13).unwrap();
        let r = sha_norm_one_biquadratic(&f).unwrap();
        assert_eq!(r.method, ShaMethod::NoncyclicDecompositionFound);
        assert!(r.group.is_trivial());
        let at5 = r.details.iter().find(|p| p.prime == 5).unwrap();
        assert!(!at5.cyclic);
        assert_eq!(at5.legendre, -1);
    }

    #[test]
    fn second_residue_pair_has_sha_z2() {
        let f = BiquadraticField::new(13, 17).unwrap();
        let r = sha_norm_one_biquadratic(&f).unwrap();
        assert_eq!(r.method, ShaMethod::AllCyclicDecomposition);
        assert_eq!(r.group.torsion, z2());
    }

    #[test]
    fn sha_is_symmetric_in_the_radicands() {
        for (a, b) in [(5, 29), (5, 13), (13, 17), (5, 21), (-3, 13), (17, 33)] {
            let f = BiquadraticField::new(a, b).unwrap();
            let g = BiquadraticField::new(b, a).unwrap();
            let rf = sha_norm_one_biquadratic(&f).unwrap();
            let rg = sha_norm_one_biquadratic(&g).unwrap();
            assert_eq!(rf.method, rg.method, "({a}, {b})");
            assert_eq!(rf.group.free_rank, rg.group.free_rank);
            assert_eq!(rf.group.torsion, rg.group.torsion);
        }
    }

    #[test]
    fn zhe_matches_sha() {
        let f = BiquadraticField::new(5, 29).unwrap();
        let zhe = zhe_of_norm_one(&f).unwrap();
        let sha = sha_norm_one_biquadratic(&f).unwrap();
        assert_eq!(zhe.group.torsion, sha.group.torsion);
        assert_eq!(zhe.method, sha.method);
    }

    #[test]
    fn permutation_lattice_torus_has_trivial_sha() {
        // diagnostic entry point: quasi-split tori have vanishing H^1
        let g = FiniteGroup::klein_four();
        let l = GLattice::regular(g);
        assert!(sha_omega(&l).is_trivial());
        assert!(crate::gmodule::h1(&l).is_trivial());
    }
}
