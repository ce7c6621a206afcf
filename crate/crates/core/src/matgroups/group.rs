use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matgroups::mat::Mat2;
use crate::matgroups::ring::{FiniteRingSpec, RingElem};

pub const DEFAULT_CAP: usize = 1_000_000;

/// A subgroup of GL_2 given by generators, optionally enumerated.
#[derive(Clone, Debug)]
pub struct SubgroupGens {
    pub spec: Arc<FiniteRingSpec>,
    pub generators: Vec<Mat2>,
    elements: Option<Vec<Mat2>>,
    index: Option<HashSet<Mat2>>,
}

impl SubgroupGens {
    pub fn new(spec: &Arc<FiniteRingSpec>, generators: Vec<Mat2>) -> Result<Self> {
        for g in &generators {
            if !g.is_invertible(spec) {
                return Err(Error::invalid(format!("generator {} is not invertible", g.display(spec))));
            }
        }
        Ok(SubgroupGens { spec: spec.clone(), generators, elements: None, index: None })
    }

    fn enumerated(spec: &Arc<FiniteRingSpec>, generators: Vec<Mat2>, mut elements: Vec<Mat2>) -> Self {
        elements.sort();
        let index = elements.iter().cloned().collect();
        SubgroupGens { spec: spec.clone(), generators, elements: Some(elements), index: Some(index) }
    }

    pub fn elements(&self) -> Option<&[Mat2]> {
        self.elements.as_deref()
    }

    pub fn order(&self) -> Option<usize> {
        self.elements.as_ref().map(Vec::len)
    }

    pub fn contains(&self, m: &Mat2) -> Option<bool> {
        self.index.as_ref().map(|ix| ix.contains(m))
    }

    fn require_elements(&self) -> Result<&[Mat2]> {
        self.elements()
            .ok_or_else(|| Error::invalid("group must be enumerated first"))
    }

    pub fn is_abelian(&self) -> bool {
        let r = &*self.spec;
        self.generators.iter().all(|a| {
            self.generators.iter().all(|b| a.mul(r, b) == b.mul(r, a))
        })
    }
}

/// Enumerate the group generated by `gens`, failing once more than `cap` elements appear.
pub fn group_closure(gens: &SubgroupGens, cap: usize) -> Result<SubgroupGens> {
    let elements = closure_of(&gens.spec, &gens.generators, cap)?;
    Ok(SubgroupGens::enumerated(&gens.spec, gens.generators.clone(), elements))
}

fn closure_of(spec: &FiniteRingSpec, gens: &[Mat2], cap: usize) -> Result<Vec<Mat2>> {
    let id = Mat2::identity(spec);
    let mut seen: HashSet<Mat2> = HashSet::new();
    let mut order = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    // In a finite group, closing under right multiplication by generators
    // yields the generated subgroup (inverses are positive powers).
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(spec, g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::Overflow { cap });
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Smallest subgroup containing `h` that is stable under conjugation by the
/// generators of `ambient`.
pub fn normal_closure(h: &SubgroupGens, ambient: &SubgroupGens, cap: usize) -> Result<SubgroupGens> {
    let spec = &*h.spec;
    if let Some(amb) = ambient.index.as_ref() {
        for g in &h.generators {
            if !amb.contains(g) {
                return Err(Error::invalid(format!(
                    "generator {} is not in the ambient group",
                    g.display(spec)
                )));
            }
        }
    }
    let conjugators: Vec<(Mat2, Mat2)> = ambient
        .generators
        .iter()
        .map(|u| (u.clone(), u.inverse(spec).expect("ambient generators are invertible")))
        .collect();
    let mut gens = h.generators.clone();
    let mut elements: HashSet<Mat2> = closure_of(spec, &gens, cap)?.into_iter().collect();
    let mut i = 0;
    while i < gens.len() {
        let x = gens[i].clone();
        for (u, ui) in &conjugators {
            let y = u.mul(spec, &x).mul(spec, ui);
            if !elements.contains(&y) {
                gens.push(y);
                elements = closure_of(spec, &gens, cap)?.into_iter().collect();
            }
        }
        i += 1;
    }
    Ok(SubgroupGens::enumerated(&h.spec, gens, elements.into_iter().collect()))
}

/// Elements commuting with every generator.
pub fn center(g: &SubgroupGens) -> Result<SubgroupGens> {
    let spec = &*g.spec;
    let els = g.require_elements()?;
    let central: Vec<Mat2> = els
        .iter()
        .filter(|z| g.generators.iter().all(|x| z.mul(spec, x) == x.mul(spec, z)))
        .cloned()
        .collect();
    let gens = central.clone();
    Ok(SubgroupGens::enumerated(&g.spec, gens, central))
}

/// Matrices whose determinant is a (k-1)-th power of a unit of the prime subring.
pub fn ghat(spec: &Arc<FiniteRingSpec>, k: u64, cap: usize) -> Result<SubgroupGens> {
    if k < 2 {
        return Err(Error::invalid("weight must be at least 2"));
    }
    let allowed = det_powers(spec, k - 1);
    let filter = |m: &Mat2| allowed.contains(&m.det(spec));
    enumerate_gl2(spec, cap, filter)
}

/// All of GL_2 of the ring.
pub fn gl2(spec: &Arc<FiniteRingSpec>, cap: usize) -> Result<SubgroupGens> {
    enumerate_gl2(spec, cap, |_| true)
}

pub fn sl2(spec: &Arc<FiniteRingSpec>, cap: usize) -> Result<SubgroupGens> {
    let one = spec.one();
    enumerate_gl2(spec, cap, |m| m.det(spec) == one)
}

/// `{u^e : u a unit of Z/p^n (diagonally embedded)}`.
fn det_powers(spec: &FiniteRingSpec, e: u64) -> HashSet<RingElem> {
    let m = spec.coord_modulus();
    (1..m)
        .filter(|&a| a % spec.p() != 0)
        .map(|a| spec.pow(&spec.from_int(a as i64), e))
        .collect()
}

fn enumerate_gl2(spec: &Arc<FiniteRingSpec>, cap: usize, keep: impl Fn(&Mat2) -> bool) -> Result<SubgroupGens> {
    if spec.gl2_order() > cap as u128 {
        return Err(Error::Overflow { cap });
    }
    let els = spec.elements();
    let mut out = Vec::new();
    for a in &els {
        for b in &els {
            for c in &els {
                for d in &els {
                    let m = Mat2::new(a.clone(), b.clone(), c.clone(), d.clone());
                    if m.is_invertible(spec) && keep(&m) {
                        out.push(m);
                    }
                }
            }
        }
    }
    let gens = small_generators(spec, &out);
    Ok(SubgroupGens::enumerated(spec, gens, out))
}

/// Greedy generating set: add elements until their closure is everything.
pub fn small_generators(spec: &FiniteRingSpec, elements: &[Mat2]) -> Vec<Mat2> {
    let target = elements.len();
    let mut gens: Vec<Mat2> = Vec::new();
    let mut have: HashSet<Mat2> = [Mat2::identity(spec)].into_iter().collect();
    let mut sorted: Vec<&Mat2> = elements.iter().collect();
    sorted.sort();
    for m in sorted {
        if have.len() == target {
            break;
        }
        if !have.contains(m) {
            gens.push(m.clone());
            have = closure_of(spec, &gens, usize::MAX)
                .expect("uncapped")
                .into_iter()
                .collect();
        }
    }
    gens
}

/// Whether the elementary matrices over an additive basis of each ring
/// component all lie in `g` (these generate SL_2 of the ring).
pub fn contains_sl2(g: &SubgroupGens) -> Result<bool> {
    let spec = &*g.spec;
    let idx = g
        .index
        .as_ref()
        .ok_or_else(|| Error::invalid("group must be enumerated first"))?;
    Ok(spec
        .additive_basis()
        .iter()
        .all(|x| idx.contains(&Mat2::e12(spec, x)) && idx.contains(&Mat2::e21(spec, x))))
}

/// Generators of SL_2 of the ring used by the adjoint action.
pub fn sl2_generators(spec: &FiniteRingSpec) -> Vec<Mat2> {
    spec.additive_basis()
        .iter()
        .flat_map(|x| [Mat2::e12(spec, x), Mat2::e21(spec, x)])
        .collect()
}

/// A cyclic non-split Cartan subgroup of GL_2(F_p): the companion matrix of
/// the first monic quadratic (in lexicographic order) whose root generates F_{p^2}^*.
pub fn nonsplit_cartan(spec: &Arc<FiniteRingSpec>) -> Result<SubgroupGens> {
    let p = match spec.kind() {
        crate::matgroups::ring::RingKind::ProductField { p, degrees } if degrees == &[1] => *p,
        crate::matgroups::ring::RingKind::ZmodPn { p, n: 1 } => *p,
        _ => return Err(Error::Unsupported("non-split Cartan is built over F_p only".into())),
    };
    let q1 = p * p - 1;
    for a in 0..p {
        for b in 0..p {
            // X^2 - a X - b with companion [[0, b], [1, a]]
            let m = Mat2::from_ints(spec, [0, b as i64, 1, a as i64]);
            if !m.is_invertible(spec) {
                continue;
            }
            let id = Mat2::identity(spec);
            let primitive = crate::arith::factorize(q1)
                .iter()
                .all(|&(l, _)| m.pow(spec, q1 / l) != id)
                && m.pow(spec, q1) == id;
            if primitive {
                let g = SubgroupGens::new(spec, vec![m])?;
                return group_closure(&g, DEFAULT_CAP);
            }
        }
    }
    Err(Error::invalid("no primitive quadratic found"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Arc<FiniteRingSpec> {
        Arc::new(FiniteRingSpec::field(p, 1).unwrap())
    }

    #[test]
    fn closures() {
        let r = fp(5);
        let id = SubgroupGens::new(&r, vec![Mat2::identity(&r)]).unwrap();
        assert_eq!(group_closure(&id, 10).unwrap().order(), Some(1));
        let rot = SubgroupGens::new(&r, vec![Mat2::from_ints(&r, [0, -1, 1, 0])]).unwrap();
        assert_eq!(group_closure(&rot, 10).unwrap().order(), Some(4));
        let r3 = fp(3);
        let el = SubgroupGens::new(&r3, sl2_generators(&r3)).unwrap();
        let sl = group_closure(&el, 100).unwrap();
        assert_eq!(sl.order(), Some(24));
        assert!(contains_sl2(&sl).unwrap());
        assert!(matches!(group_closure(&el, 10), Err(Error::Overflow { cap: 10 })));
    }

    #[test]
    fn centers() {
        let r3 = fp(3);
        let g = gl2(&r3, DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), Some(48));
        let z = center(&g).unwrap();
        let mut got: Vec<Mat2> = z.elements().unwrap().to_vec();
        got.sort();
        let mut want = vec![Mat2::identity(&r3), Mat2::scalar(&r3, &r3.from_int(2))];
        want.sort();
        assert_eq!(got, want);
        let r5 = fp(5);
        let s = sl2(&r5, DEFAULT_CAP).unwrap();
        assert_eq!(s.order(), Some(120));
        assert_eq!(center(&s).unwrap().order(), Some(2));
    }

    #[test]
    fn ghat_orders() {
        let r5 = fp(5);
        assert_eq!(ghat(&r5, 2, DEFAULT_CAP).unwrap().order(), Some(480));
        let g5 = ghat(&r5, 5, DEFAULT_CAP).unwrap();
        assert_eq!(g5.order(), Some(120));
        assert!(contains_sl2(&g5).unwrap());
        assert!(matches!(ghat(&r5, 2, 100), Err(Error::Overflow { .. })));
    }

    #[test]
    fn cartan_normal_closure_is_everything() {
        let r5 = fp(5);
        let g = gl2(&r5, DEFAULT_CAP).unwrap();
        let c = nonsplit_cartan(&r5).unwrap();
        assert_eq!(c.order(), Some(24));
        let n = normal_closure(&c, &g, DEFAULT_CAP).unwrap();
        assert_eq!(n.order(), Some(480));
        let z = center(&g).unwrap();
        assert_eq!(normal_closure(&z, &g, DEFAULT_CAP).unwrap().order(), Some(4));
    }

    #[test]
    fn diagonal_group_lacks_sl2() {
        let r5 = fp(5);
        let diag = SubgroupGens::new(&r5, vec![Mat2::from_ints(&r5, [2, 0, 0, 1]), Mat2::from_ints(&r5, [1, 0, 0, 2])]).unwrap();
        let d = group_closure(&diag, 100).unwrap();
        assert_eq!(d.order(), Some(16));
        assert!(!contains_sl2(&d).unwrap());
        assert!(contains_sl2(&gl2(&r5, DEFAULT_CAP).unwrap()).unwrap());
    }
}
