//! Integer utilities: extended gcd, deterministic primality, square-free
//! tests, factorization at desk scale, and the alpha/beta Bezout data used
//! by the U(p) coset construction.

use num_integer::Integer;

/// Non-negative gcd.
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y == g` and `g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `m > 1`, in `[1, m)`.  Panics unless
/// `gcd(a, m) == 1`.
pub fn inv_mod(a: i64, m: i64) -> i64 {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    assert_eq!(g, 1, "inv_mod: {a} is not a unit mod {m}");
    x.rem_euclid(m)
}

/// Solution of `x = r1 (mod m1)`, `x = r2 (mod m2)` for coprime moduli,
/// reduced to `[0, m1*m2)`.
pub fn crt(r1: i64, m1: i64, r2: i64, m2: i64) -> i64 {
    assert_eq!(gcd_i64(m1, m2), 1, "crt: moduli must be coprime");
    let m = m1
        .checked_mul(m2)
        .expect("crt: modulus product overflows i64");
    let inv = inv_mod(m1.rem_euclid(m2), m2);
    let diff = (r2 - r1).rem_euclid(m2);
    let x = r1 as i128 + (m1 as i128) * ((diff as i128 * inv as i128) % m2 as i128);
    (x.rem_euclid(m as i128)) as i64
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Modular exponentiation `a^e mod m`.
pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `u64` with the standard witness set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial-division factorization, `n >= 1`.  Returns `(prime, exponent)`
/// pairs in increasing prime order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut p = 3u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e);
        p += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    out
}

/// True when no square of a prime divides `n` (`n >= 1`).
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    factor(n).iter().all(|&(_, e)| e == 1)
}

/// p-adic valuation of `n != 0`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |y| y <= n) {
        x += 1;
    }
    x
}

/// Smallest primitive root modulo an odd prime `q`.
pub fn primitive_root(q: u64) -> u64 {
    assert!(q > 2 && is_prime(q), "primitive_root: {q} must be an odd prime");
    let phi = q - 1;
    let prime_divisors: Vec<u64> = factor(phi).into_iter().map(|(p, _)| p).collect();
    'g: for g in 2..q {
        for &p in &prime_divisors {
            if powmod(g, phi / p, q) == 1 {
                continue 'g;
            }
        }
        return g;
    }
    unreachable!("a primitive root exists for every odd prime")
}

/// Kronecker symbol `(a|n)`, the Jacobi symbol extended to every
/// integer `n` with the usual conventions at 2, -1 and 0.
pub fn kronecker(mut a: i64, mut n: i64) -> i64 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut sign = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let a8 = a.rem_euclid(8);
        if v % 2 == 1 && (a8 == 3 || a8 == 5) {
            sign = -sign;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        let r = a;
        a = n % r;
        n = r;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Moebius function.
pub fn moebius(n: u64) -> i64 {
    assert!(n >= 1);
    let factors = factor(n);
    if factors.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Bezout data for the level: `alpha*p^2 + beta*n == p` with
/// `0 <= beta < p`.  Exists exactly when `p` divides `n` exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaBeta {
    pub p: i64,
    pub n: i64,
    pub alpha: i64,
    pub beta: i64,
}

impl AlphaBeta {
    /// Solve `alpha*p^2 + beta*n == p` for an odd prime `p` exactly
    /// dividing `n`, taking the smallest non-negative `beta`.
    pub fn for_level(p: i64, n: i64) -> Option<AlphaBeta> {
        if p < 3 || n < 1 || !is_prime(p as u64) || n % p != 0 || (n / p) % p == 0 {
            return None;
        }
        // Dividing the identity by p: alpha*p + beta*(n/p) == 1.
        let n1 = n / p;
        let beta = inv_mod(n1.rem_euclid(p), p);
        let alpha = (1 - beta * n1) / p;
        debug_assert_eq!(alpha * p * p + beta * n, p);
        Some(AlphaBeta { p, n, alpha, beta })
    }
}
