//! Galois orbits of Dirichlet characters, keyed by their least Conrey index.
//!
//! Two characters mod M are Galois conjugate iff they have the same kernel,
//! and the kernel of a Conrey character does not depend on which primitive
//! roots are used to build the labelling, so the key is canonical.

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};

/// Discrete-log data for one prime-power factor of the modulus.
struct Component {
    modulus: u64,
    /// For odd p: log to a fixed generator, order phi. For 2^e, e >= 3:
    /// (sign bit, log base 5).
    logs: Vec<Option<(u64, u64)>>,
    kind: Kind,
}

#[derive(Clone, Copy)]
enum Kind {
    Cyclic { order: u64 },
    Two { e: u32 },
}

fn components(m: u64) -> Vec<Component> {
    let mut out = Vec::new();
    for (p, e) in factorize(m) {
        let q = p.pow(e);
        if p == 2 {
            if e == 1 {
                continue;
            }
            let mut logs = vec![None; q as usize];
            let mut x = 1u64;
            let half = if e >= 3 { q / 4 } else { 1 };
            for a in 0..half {
                logs[x as usize] = Some((0, a));
                logs[(q - x) as usize] = Some((1, a));
                x = x * 5 % q;
            }
            out.push(Component { modulus: q, logs, kind: Kind::Two { e } });
        } else {
            let phi = q / p * (p - 1);
            let g = (2..q)
                .find(|&g| gcd(g, q) == 1 && order_mod(g, q) == phi)
                .expect("odd prime powers have primitive roots");
            let mut logs = vec![None; q as usize];
            let mut x = 1u64;
            for a in 0..phi {
                logs[x as usize] = Some((0, a));
                x = x * g % q;
            }
            out.push(Component { modulus: q, logs, kind: Kind::Cyclic { order: phi } });
        }
    }
    out
}

fn order_mod(g: u64, q: u64) -> u64 {
    let mut x = g % q;
    let mut k = 1;
    while x != 1 {
        x = x * g % q;
        k += 1;
    }
    k
}

/// chi_n(a) as a fraction of a full turn, numerator over `den`.
fn conrey_value(comps: &[Component], den: u64, n: u64, a: u64) -> u64 {
    let mut acc = 0u64;
    for c in comps {
        let (sn, ln) = c.logs[(n % c.modulus) as usize].expect("unit");
        let (sa, la) = c.logs[(a % c.modulus) as usize].expect("unit");
        match c.kind {
            Kind::Cyclic { order } => acc += den / order * (ln * la % order),
            Kind::Two { e } => {
                acc += den / 2 * (sn * sa);
                if e >= 3 {
                    let o = 1u64 << (e - 2);
                    acc += den / o * (ln * la % o);
                }
            }
        }
        acc %= den;
    }
    acc
}

fn common_denominator(comps: &[Component]) -> u64 {
    comps.iter().fold(1, |d, c| {
        let o = match c.kind {
            Kind::Cyclic { order } => order,
            Kind::Two { e } => 2 * (1u64 << e.saturating_sub(2)),
        };
        d / gcd(d, o) * o
    })
}

/// Kernel of the Conrey character chi_n mod m, as a membership table over residues.
pub fn conrey_kernel(m: u64, n: u64) -> Result<Vec<bool>> {
    if m == 0 || gcd(n, m) != 1 {
        return Err(Error::invalid(format!("{n} is not a unit mod {m}")));
    }
    let comps = components(m);
    let den = common_denominator(&comps);
    Ok((0..m)
        .map(|a| gcd(a, m) == 1 && conrey_value(&comps, den, n, a) == 0)
        .collect())
}

/// Least Conrey index whose character has the given kernel.
pub fn orbit_key(m: u64, kernel: &[bool]) -> Result<u64> {
    if kernel.len() as u64 != m {
        return Err(Error::invalid("kernel table has the wrong length"));
    }
    let comps = components(m);
    let den = common_denominator(&comps);
    (1..m.max(2))
        .filter(|&n| gcd(n, m) == 1)
        .find(|&n| (0..m).all(|a| (gcd(a, m) == 1 && conrey_value(&comps, den, n, a) == 0) == kernel[a as usize]))
        .ok_or_else(|| Error::invalid(format!("no character mod {m} has this kernel")))
}

/// Least index in the Galois orbit of the Conrey character chi_n mod m.
pub fn orbit_min(m: u64, n: u64) -> Result<u64> {
    orbit_key(m, &conrey_kernel(m, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_quadratic() {
        assert_eq!(orbit_min(15, 1).unwrap(), 1);
        assert_eq!(orbit_min(15, 4).unwrap(), 4);
        // mod 13 the quadratic character is chi_12
        assert_eq!(orbit_min(13, 12).unwrap(), 12);
    }

    #[test]
    fn orbits_partition_units() {
        // Orbit sizes sum to phi(m) and each orbit has phi(order) members.
        for m in [7u64, 8, 9, 13, 15, 16, 21, 24, 30, 40] {
            let units: Vec<u64> = (1..m).filter(|&n| gcd(n, m) == 1).collect();
            let keys: Vec<u64> = units.iter().map(|&n| orbit_min(m, n).unwrap()).collect();
            for &k in &keys {
                let k_ker = conrey_kernel(m, k).unwrap();
                let kernel_size = k_ker.iter().filter(|&&b| b).count() as u64;
                let order = units.len() as u64 / kernel_size;
                let members = keys.iter().filter(|&&x| x == k).count() as u64;
                assert_eq!(members, crate::arith::euler_phi(order), "m={m} key={k}");
            }
        }
    }
}
