//! Dirichlet characters as explicit value tables.
//!
//! A character mod F is stored as one component per prime power factor
//! of F.  Each component keeps the full table of values on residues,
//! built from values at generators of the unit group, so evaluation is
//! a table lookup and conductor questions reduce to kernel scans.
//! Values are roots of unity in the reduced form e(num/den); sums of
//! such roots are handled exactly by reduction modulo the cyclotomic
//! polynomial, which decides rationality without approximation.

use std::fmt;

use crate::arith::{crt, factor, gcd_i64, is_prime, kronecker, powmod, primitive_root};
use crate::rational::{rat, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharError {
    BadModulus { modulus: i64 },
    NotPrime { p: i64 },
    BadOrder { order: i64, modulus: i64 },
    BadIndex { index: i64, count: i64 },
    DuplicatePrime { p: i64 },
}

impl fmt::Display for CharError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharError::BadModulus { modulus } => {
                write!(f, "invalid character modulus {modulus}")
            }
            CharError::NotPrime { p } => write!(f, "{p} is not an odd prime"),
            CharError::BadOrder { order, modulus } => {
                write!(f, "value order {order} does not divide the unit group order mod {modulus}")
            }
            CharError::BadIndex { index, count } => {
                write!(f, "character index {index} out of range (have {count})")
            }
            CharError::DuplicatePrime { p } => {
                write!(f, "two components share the prime {p}")
            }
        }
    }
}

impl std::error::Error for CharError {}

/// The root of unity e(num/den), kept reduced with 0 <= num < den.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnityRoot {
    num: i64,
    den: i64,
}

impl UnityRoot {
    pub fn new(num: i64, den: i64) -> UnityRoot {
        assert!(den > 0, "root order must be positive");
        let num = num.rem_euclid(den);
        let g = gcd_i64(num, den);
        if num == 0 {
            UnityRoot { num: 0, den: 1 }
        } else {
            UnityRoot { num: num / g, den: den / g }
        }
    }

    pub fn one() -> UnityRoot {
        UnityRoot { num: 0, den: 1 }
    }

    pub fn minus_one() -> UnityRoot {
        UnityRoot { num: 1, den: 2 }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    /// Multiplicative order, which for the reduced form is the denominator.
    pub fn order(&self) -> i64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.den == 1
    }

    pub fn mul(&self, other: &UnityRoot) -> UnityRoot {
        UnityRoot::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }

    pub fn pow(&self, k: i64) -> UnityRoot {
        UnityRoot::new((self.num * k.rem_euclid(self.den)).rem_euclid(self.den), self.den)
    }

    /// The value as a rational number, available exactly for orders 1 and 2.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.den {
            1 => Some(rat(1)),
            2 => Some(rat(-1)),
            _ => None,
        }
    }
}

impl fmt::Display for UnityRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.den {
            1 => write!(f, "1"),
            2 => write!(f, "-1"),
            _ => write!(f, "e({}/{})", self.num, self.den),
        }
    }
}

/// A character modulo a single prime power, as a full value table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharComponent {
    prime: i64,
    power: u32,
    modulus: i64,
    table: Vec<Option<UnityRoot>>,
}

impl CharComponent {
    fn from_table(prime: i64, power: u32, table: Vec<Option<UnityRoot>>) -> CharComponent {
        let modulus = prime.pow(power);
        debug_assert_eq!(table.len() as i64, modulus);
        #[cfg(debug_assertions)]
        if modulus <= 256 {
            for x in 0..modulus {
                assert_eq!(table[x as usize].is_none(), gcd_i64(x, modulus) > 1);
                for y in 0..modulus {
                    if let (Some(a), Some(b)) = (&table[x as usize], &table[y as usize]) {
                        let xy = (x * y).rem_euclid(modulus);
                        assert_eq!(table[xy as usize], Some(a.mul(b)));
                    }
                }
            }
        }
        CharComponent { prime, power, modulus, table }
    }

    /// The trivial character mod p^e.
    pub fn trivial(p: i64, e: u32) -> CharComponent {
        assert!(p >= 2 && is_prime(p as u64) && e >= 1);
        let modulus = p.pow(e);
        let table = (0..modulus)
            .map(|x| if gcd_i64(x, p) == 1 { Some(UnityRoot::one()) } else { None })
            .collect();
        CharComponent::from_table(p, e, table)
    }

    /// The character mod p^e (p odd) sending the canonical generator of
    /// the unit group to `value`.
    pub fn odd_prime_power(p: i64, e: u32, value: UnityRoot) -> Result<CharComponent, CharError> {
        if p < 3 || !is_prime(p as u64) {
            return Err(CharError::NotPrime { p });
        }
        assert!(e >= 1);
        let modulus = p.pow(e);
        let group_order = modulus / p * (p - 1);
        if group_order % value.order() != 0 {
            return Err(CharError::BadOrder { order: value.order(), modulus });
        }
        let g = unit_group_generator(p, e) as u64;
        let mut table = vec![None; modulus as usize];
        let mut x = 1u64;
        for j in 0..group_order {
            table[x as usize] = Some(value.pow(j));
            x = (x * g) % modulus as u64;
        }
        debug_assert_eq!(x, 1);
        Ok(CharComponent::from_table(p, e, table))
    }

    /// The character mod 2^e determined by its values at -1 and 5, the
    /// generators of the unit group for e >= 3.  For e <= 2 the group is
    /// generated by -1 alone and `at_five` must be 1.
    pub fn two_power(
        e: u32,
        at_minus_one: UnityRoot,
        at_five: UnityRoot,
    ) -> Result<CharComponent, CharError> {
        assert!(e >= 1);
        let modulus = 2i64.pow(e);
        if at_minus_one.order() > 2 {
            return Err(CharError::BadOrder { order: at_minus_one.order(), modulus });
        }
        let five_order = if e >= 3 { modulus / 4 } else { 1 };
        if five_order % at_five.order() != 0 {
            return Err(CharError::BadOrder { order: at_five.order(), modulus });
        }
        if e == 1 && !at_minus_one.is_one() {
            return Err(CharError::BadOrder { order: at_minus_one.order(), modulus });
        }
        let mut table = vec![None; modulus as usize];
        table[1 % modulus as usize] = Some(UnityRoot::one());
        if e >= 2 {
            let mut x = 1i64;
            for j in 0..five_order {
                let v = at_five.pow(j);
                table[x as usize] = Some(v);
                table[(modulus - x) as usize] = Some(at_minus_one.mul(&v));
                x = (x * 5).rem_euclid(modulus);
            }
        }
        Ok(CharComponent::from_table(2, e, table))
    }

    pub fn prime(&self) -> i64 {
        self.prime
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn eval(&self, x: i64) -> Option<UnityRoot> {
        self.table[x.rem_euclid(self.modulus) as usize]
    }

    /// The value at -1, as a sign.
    pub fn parity(&self) -> i8 {
        let v = self.eval(self.modulus - 1).expect("-1 is a unit");
        if v.is_one() {
            1
        } else {
            -1
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().flatten().all(|v| v.is_one())
    }

    /// Smallest p^c such that the character factors through (Z/p^c)^*.
    pub fn conductor(&self) -> i64 {
        for c in 0..=self.power {
            let q = self.prime.pow(c);
            let factors = (0..self.modulus).all(|x| match &self.table[x as usize] {
                Some(v) => x.rem_euclid(q) != 1 % q || v.is_one(),
                None => true,
            });
            if factors {
                return q;
            }
        }
        unreachable!("every character factors through its own modulus")
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }
}

/// A Dirichlet character, stored as one component per prime power of
/// the modulus together with its parity and primitivity flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: i64,
    components: Vec<CharComponent>,
    parity: i8,
    primitive: bool,
}

impl DirichletCharacter {
    /// Assembles a character from components at distinct primes.
    pub fn from_components(mut components: Vec<CharComponent>) -> Result<DirichletCharacter, CharError> {
        components.sort_by_key(|c| c.prime);
        for pair in components.windows(2) {
            if pair[0].prime == pair[1].prime {
                return Err(CharError::DuplicatePrime { p: pair[0].prime });
            }
        }
        let modulus = components.iter().map(|c| c.modulus).product();
        let parity = components.iter().map(|c| c.parity()).product();
        let primitive = components.iter().all(|c| c.is_primitive());
        Ok(DirichletCharacter { modulus, components, parity, primitive })
    }

    /// The trivial character mod `modulus`.
    pub fn trivial(modulus: i64) -> Result<DirichletCharacter, CharError> {
        if modulus < 1 {
            return Err(CharError::BadModulus { modulus });
        }
        let components = factor(modulus as u64)
            .into_iter()
            .map(|(p, e)| CharComponent::trivial(p as i64, e))
            .collect();
        DirichletCharacter::from_components(components)
    }

    /// The Legendre symbol character mod an odd prime `p`.
    pub fn legendre(p: i64) -> Result<DirichletCharacter, CharError> {
        let component = CharComponent::odd_prime_power(p, 1, UnityRoot::minus_one())?;
        DirichletCharacter::from_components(vec![component])
    }

    /// The `index`-th odd character mod an odd prime `q`: the generator
    /// goes to e(j/(q-1)) for j = 2*index + 1.
    pub fn odd_character_mod(q: i64, index: i64) -> Result<DirichletCharacter, CharError> {
        if q < 3 || !is_prime(q as u64) {
            return Err(CharError::NotPrime { p: q });
        }
        let count = (q - 1) / 2;
        if index < 0 || index >= count {
            return Err(CharError::BadIndex { index, count });
        }
        let value = UnityRoot::new(2 * index + 1, q - 1);
        let component = CharComponent::odd_prime_power(q, 1, value)?;
        DirichletCharacter::from_components(vec![component])
    }

    /// The Kronecker symbol (m|.) as a character mod 4|m|.
    pub fn kronecker(m: i64) -> Result<DirichletCharacter, CharError> {
        if m == 0 {
            return Err(CharError::BadModulus { modulus: 0 });
        }
        let big = 4 * m.abs();
        let mut components = Vec::new();
        for (p, e) in factor(big as u64) {
            let q = p.pow(e) as i64;
            let rest = big / q;
            let table = (0..q)
                .map(|x| {
                    if gcd_i64(x, p as i64) > 1 {
                        return None;
                    }
                    let lift = crt(x, q, 1, rest);
                    match kronecker(m, lift) {
                        1 => Some(UnityRoot::one()),
                        -1 => Some(UnityRoot::minus_one()),
                        v => unreachable!("(m|{lift}) = {v} at a unit"),
                    }
                })
                .collect();
            components.push(CharComponent::from_table(p as i64, e, table));
        }
        DirichletCharacter::from_components(components)
    }

    /// Pointwise product, as a character mod the lcm of the moduli.
    pub fn mul(&self, other: &DirichletCharacter) -> DirichletCharacter {
        let mut components: Vec<CharComponent> = Vec::new();
        let mut primes: Vec<i64> = self
            .components
            .iter()
            .chain(&other.components)
            .map(|c| c.prime)
            .collect();
        primes.sort_unstable();
        primes.dedup();
        for p in primes {
            let a = self.component_at(p);
            let b = other.component_at(p);
            let merged = match (a, b) {
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (Some(a), Some(b)) => {
                    let e = a.power.max(b.power);
                    let modulus = p.pow(e);
                    let table = (0..modulus)
                        .map(|x| match (a.eval(x), b.eval(x)) {
                            (Some(u), Some(v)) => Some(u.mul(&v)),
                            _ => None,
                        })
                        .collect();
                    CharComponent::from_table(p, e, table)
                }
                (None, None) => unreachable!(),
            };
            components.push(merged);
        }
        DirichletCharacter::from_components(components).expect("primes are deduplicated")
    }

    /// The twist psi_t(d) = psi(d) (t|d) (-1|d) used for theta series of
    /// shift `t`, equal to the product with the Kronecker character of -t.
    pub fn theta_twist(&self, t: i64) -> Result<DirichletCharacter, CharError> {
        if t < 1 {
            return Err(CharError::BadModulus { modulus: t });
        }
        Ok(self.mul(&DirichletCharacter::kronecker(-t)?))
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn components(&self) -> &[CharComponent] {
        &self.components
    }

    pub fn component_at(&self, p: i64) -> Option<&CharComponent> {
        self.components.iter().find(|c| c.prime == p)
    }

    /// The stored sign of chi(-1).
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_odd(&self) -> bool {
        self.parity == -1
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn conductor(&self) -> i64 {
        self.components.iter().map(|c| c.conductor()).product()
    }

    /// Product of the primes whose component is odd.
    pub fn odd_part(&self) -> i64 {
        self.components.iter().filter(|c| c.parity() == -1).map(|c| c.prime).product()
    }

    /// True when every value is rational, so the character is quadratic
    /// or trivial.
    pub fn is_real(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.table.iter().flatten().all(|v| v.order() <= 2))
    }

    pub fn eval(&self, x: i64) -> Option<UnityRoot> {
        let mut acc = UnityRoot::one();
        for c in &self.components {
            acc = acc.mul(&c.eval(x)?);
        }
        Some(acc)
    }

    /// The value as a rational number: 0 off the units, the sign on
    /// units of a real character, None when the value is irrational.
    pub fn rational_value(&self, x: i64) -> Option<Rational> {
        match self.eval(x) {
            None => Some(Rational::zero()),
            Some(v) => v.as_rational(),
        }
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi mod {}", self.modulus)?;
        if self.components.is_empty() {
            return Ok(());
        }
        write!(f, " [")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}^{}", c.prime, c.power)?;
        }
        write!(f, "]")
    }
}

/// The canonical generator of the unit group mod p^e for odd prime p:
/// the smallest primitive root mod p, bumped by p when it fails to
/// generate mod p^2.
pub fn unit_group_generator(p: i64, e: u32) -> i64 {
    assert!(p >= 3 && e >= 1);
    let mut g = primitive_root(p as u64);
    if e >= 2 && powmod(g, p as u64 - 1, (p * p) as u64) == 1 {
        g += p as u64;
    }
    g as i64
}

/// An exact finite sum of rational multiples of roots of unity.
#[derive(Debug, Clone, Default)]
pub struct RootSum {
    terms: Vec<(UnityRoot, Rational)>,
}

impl RootSum {
    pub fn new() -> RootSum {
        RootSum { terms: Vec::new() }
    }

    pub fn add(&mut self, coeff: Rational, root: UnityRoot) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.iter_mut().find(|(r, _)| *r == root) {
            Some((_, c)) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.retain(|(_, c)| !c.is_zero());
                }
            }
            None => self.terms.push((root, coeff)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates the sum when it is rational, by reducing the exponent
    /// polynomial modulo the cyclotomic polynomial of the common order.
    /// Returns None when the value is irrational.
    pub fn rational_value(&self) -> Option<Rational> {
        let mut order = 1i64;
        for (root, _) in &self.terms {
            order = order / gcd_i64(order, root.order()) * root.order();
        }
        let mut poly = vec![Rational::zero(); order as usize];
        for (root, coeff) in &self.terms {
            let k = (root.numerator() * (order / root.order())) as usize;
            poly[k] += coeff;
        }
        let phi = cyclotomic_polynomial(order as u64);
        reduce_mod(&mut poly, &phi);
        if poly.iter().skip(1).all(|c| c.is_zero()) {
            Some(poly.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }
}

/// Coefficients of the n-th cyclotomic polynomial, ascending degree.
fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            poly = divide_exact(&poly, &phi_d);
        }
    }
    poly
}

/// Exact division of integer polynomials with monic divisor.
fn divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    assert_eq!(*den.last().unwrap(), 1);
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        quot[i - dd] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i - dd + j] -= c * dj;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division must be exact");
    quot
}

/// In-place remainder of `poly` modulo the monic integer polynomial `m`.
fn reduce_mod(poly: &mut [Rational], m: &[i64]) {
    let dd = m.len() - 1;
    for i in (dd..poly.len()).rev() {
        if poly[i].is_zero() {
            continue;
        }
        let c = poly[i].clone();
        for (j, &mj) in m.iter().enumerate() {
            if mj != 0 {
                let t = &c * rat(mj);
                poly[i - dd + j] -= t;
            }
        }
        debug_assert!(poly[i].is_zero());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn unity_root_arithmetic() {
        let i = UnityRoot::new(1, 4);
        assert_eq!(i.mul(&i), UnityRoot::minus_one());
        assert_eq!(i.pow(4), UnityRoot::one());
        assert_eq!(i.pow(-1), UnityRoot::new(3, 4));
        assert_eq!(UnityRoot::new(6, 8), UnityRoot::new(3, 4));
        assert_eq!(UnityRoot::new(-1, 3), UnityRoot::new(2, 3));
        assert_eq!(UnityRoot::one().as_rational(), Some(rat(1)));
        assert_eq!(UnityRoot::minus_one().as_rational(), Some(rat(-1)));
        assert_eq!(i.as_rational(), None);
        assert_eq!(UnityRoot::new(2, 3).order(), 3);
    }

    #[test]
    fn legendre_matches_kronecker_symbol() {
        for p in [3i64, 5, 7, 11, 13] {
            let chi = DirichletCharacter::legendre(p).unwrap();
            assert_eq!(chi.modulus(), p);
            assert!(chi.is_primitive());
            assert!(chi.is_real());
            for x in -20..40 {
                assert_eq!(chi.rational_value(x).unwrap(), rat(kronecker(x, p)), "x = {x} mod {p}");
            }
            assert_eq!(chi.parity() as i64, kronecker(-1, p));
        }
    }

    #[test]
    fn trivial_characters() {
        let chi = DirichletCharacter::trivial(12).unwrap();
        assert_eq!(chi.modulus(), 12);
        assert_eq!(chi.parity(), 1);
        assert!(!chi.is_primitive());
        assert_eq!(chi.conductor(), 1);
        for x in 0..12 {
            let expect = if gcd_i64(x, 12) == 1 { rat(1) } else { rat(0) };
            assert_eq!(chi.rational_value(x).unwrap(), expect);
        }
        let one = DirichletCharacter::trivial(1).unwrap();
        assert_eq!(one.modulus(), 1);
        assert!(one.is_primitive());
        assert_eq!(one.eval(0), Some(UnityRoot::one()));
        assert!(DirichletCharacter::trivial(0).is_err());
    }

    #[test]
    fn kronecker_character_values_and_parity() {
        for m in [-15i64, -11, -8, -4, -3, -1, 2, 3, 5, 12] {
            let chi = DirichletCharacter::kronecker(m).unwrap();
            assert_eq!(chi.modulus(), 4 * m.abs());
            for x in 0..(4 * m.abs()) {
                assert_eq!(
                    chi.rational_value(x).unwrap(),
                    rat(if gcd_i64(x, 4 * m.abs()) > 1 { 0 } else { kronecker(m, x) }),
                    "({m}|{x})"
                );
            }
            assert_eq!(chi.is_odd(), m < 0, "parity of ({m}|.)");
        }
    }

    #[test]
    fn conductors_of_kronecker_characters() {
        assert_eq!(DirichletCharacter::kronecker(-1).unwrap().conductor(), 4);
        assert_eq!(DirichletCharacter::kronecker(2).unwrap().conductor(), 8);
        assert_eq!(DirichletCharacter::kronecker(-3).unwrap().conductor(), 3);
        assert_eq!(DirichletCharacter::kronecker(5).unwrap().conductor(), 5);
        assert_eq!(DirichletCharacter::kronecker(3).unwrap().conductor(), 12);
        assert_eq!(DirichletCharacter::kronecker(-15).unwrap().conductor(), 15);
    }

    #[test]
    fn products_and_odd_part() {
        let chi3 = DirichletCharacter::legendre(3).unwrap();
        let chi5 = DirichletCharacter::legendre(5).unwrap();
        let chi15 = chi3.mul(&chi5);
        assert_eq!(chi15.modulus(), 15);
        assert_eq!(chi15.parity(), -1);
        assert_eq!(chi15.odd_part(), 3);
        assert!(chi15.is_primitive());
        for x in 0..15 {
            assert_eq!(
                chi15.rational_value(x).unwrap(),
                rat(kronecker(x, 3) * kronecker(x, 5))
            );
        }
        let square = chi3.mul(&chi3);
        assert_eq!(square.modulus(), 3);
        assert_eq!(square.conductor(), 1);
        assert_eq!(square.rational_value(2).unwrap(), rat(1));
    }

    #[test]
    fn order_four_component() {
        let chi = DirichletCharacter::odd_character_mod(5, 0).unwrap();
        assert!(chi.is_odd());
        assert!(!chi.is_real());
        assert_eq!(chi.eval(2), Some(UnityRoot::new(1, 4)));
        assert_eq!(chi.eval(4), Some(UnityRoot::minus_one()));
        assert_eq!(chi.rational_value(2), None);
        assert_eq!(chi.rational_value(4), Some(rat(-1)));
        assert_eq!(chi.rational_value(5), Some(rat(0)));
        assert!(DirichletCharacter::odd_character_mod(5, 2).is_err());
        assert!(DirichletCharacter::odd_character_mod(4, 0).is_err());
    }

    #[test]
    fn stored_flags_match_evaluation() {
        let mod9 = DirichletCharacter::from_components(vec![CharComponent::odd_prime_power(
            3,
            2,
            UnityRoot::minus_one(),
        )
        .unwrap()])
        .unwrap();
        let chars = vec![
            DirichletCharacter::trivial(12).unwrap(),
            DirichletCharacter::legendre(7).unwrap(),
            DirichletCharacter::kronecker(-15).unwrap(),
            DirichletCharacter::kronecker(12).unwrap(),
            DirichletCharacter::legendre(3).unwrap().theta_twist(2).unwrap(),
            DirichletCharacter::odd_character_mod(13, 2).unwrap(),
            mod9,
        ];
        for chi in chars {
            let f = chi.modulus();
            let minus = chi.eval(f - 1).map_or(0, |v| if v.is_one() { 1 } else { -1 });
            assert_eq!(chi.parity() as i64, minus as i64, "{chi}");
            assert_eq!(chi.is_primitive(), chi.conductor() == f, "{chi}");
            for x in 0..f {
                assert_eq!(chi.eval(x).is_none(), gcd_i64(x, f) > 1, "{chi} at {x}");
                for y in 0..f {
                    if let (Some(a), Some(b)) = (chi.eval(x), chi.eval(y)) {
                        assert_eq!(chi.eval((x * y) % f.max(1)), Some(a.mul(&b)));
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_lift_mod_nine_has_conductor_three() {
        let c = CharComponent::odd_prime_power(3, 2, UnityRoot::minus_one()).unwrap();
        assert_eq!(c.modulus(), 9);
        assert_eq!(c.conductor(), 3);
        assert!(!c.is_primitive());
        assert_eq!(c.parity(), -1);
        let full = CharComponent::odd_prime_power(3, 2, UnityRoot::new(1, 6)).unwrap();
        assert_eq!(full.conductor(), 9);
        assert!(full.is_primitive());
    }

    #[test]
    fn two_power_components() {
        let chi4 = CharComponent::two_power(2, UnityRoot::minus_one(), UnityRoot::one()).unwrap();
        assert_eq!(chi4.eval(3), Some(UnityRoot::minus_one()));
        assert!(chi4.is_primitive());
        let chi8 = CharComponent::two_power(3, UnityRoot::minus_one(), UnityRoot::minus_one()).unwrap();
        for x in [1i64, 3, 5, 7] {
            let expect = kronecker(-2, x);
            let got = chi8.eval(x).unwrap().as_rational().unwrap();
            assert_eq!(got, rat(expect), "(-2|{x})");
        }
        assert!(CharComponent::two_power(2, UnityRoot::new(1, 4), UnityRoot::one()).is_err());
        assert!(CharComponent::two_power(1, UnityRoot::minus_one(), UnityRoot::one()).is_err());
    }

    #[test]
    fn theta_twist_matches_symbol_product() {
        let psi = DirichletCharacter::legendre(3).unwrap();
        for t in [1i64, 2, 3, 5, 6] {
            let tw = psi.theta_twist(t).unwrap();
            for d in 1..60 {
                let expect = kronecker(d, 3) * kronecker(t, d) * kronecker(-1, d);
                let got = tw.rational_value(d).unwrap();
                assert_eq!(got, rat(if gcd_i64(d, tw.modulus()) > 1 { 0 } else { expect }));
            }
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len(), 49);
    }

    #[test]
    fn root_sums_collapse_exactly() {
        let mut s = RootSum::new();
        s.add(rat(1), UnityRoot::new(1, 3));
        s.add(rat(1), UnityRoot::new(2, 3));
        assert_eq!(s.rational_value(), Some(rat(-1)));

        let mut s = RootSum::new();
        s.add(rat(1), UnityRoot::new(1, 3));
        s.add(rat(-1), UnityRoot::new(1, 6));
        assert_eq!(s.rational_value(), Some(rat(-1)));

        let mut s = RootSum::new();
        s.add(rat(2), UnityRoot::new(1, 4));
        s.add(rat(1), UnityRoot::new(3, 4));
        assert_eq!(s.rational_value(), None);

        let mut s = RootSum::new();
        for j in [1i64, 3, 5, 7] {
            s.add(rat(1), UnityRoot::new(j, 8));
        }
        assert_eq!(s.rational_value(), Some(rat(0)));

        let mut s = RootSum::new();
        for j in 1..5 {
            s.add(ratio(1, 2), UnityRoot::new(j, 5));
        }
        assert_eq!(s.rational_value(), Some(ratio(-1, 2)));

        let mut s = RootSum::new();
        s.add(rat(3), UnityRoot::one());
        s.add(rat(-3), UnityRoot::one());
        assert!(s.is_empty());
        assert_eq!(s.rational_value(), Some(rat(0)));
    }
}
