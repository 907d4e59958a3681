//! Elementary integer arithmetic: factorization, Möbius, totient, Kronecker symbol.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Prime factorization by trial division as `(p, e)` pairs, increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function. `n` must be positive.
pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient. `n` must be positive.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi is defined for n >= 1");
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Multiplicative order of `a` modulo `m`; `a` must be a unit.
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    let lambda = euler_phi(m);
    let mut ord = lambda;
    for (p, _) in factorize(lambda) {
        while ord % p == 0 && mod_pow(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Modular inverse of a unit `a` modulo `m`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Whether `d` is a fundamental discriminant.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return (mr == 2 || mr == 3) && is_squarefree(m.unsigned_abs());
    }
    false
}

/// Kronecker symbol `(d / m)` for arbitrary integers.
pub fn kronecker(d: i64, m: i64) -> i8 {
    if m == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = m;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    // factor out 2 from the bottom argument
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        n >>= twos;
    }
    result * jacobi(d, n)
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i8 {
    assert!(n > 0 && n % 2 == 1, "jacobi needs an odd positive modulus");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result: i8 = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}
