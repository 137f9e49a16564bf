use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use super::group::{DefiningRelation, PcElement, PcGroup};
use super::ops::{direct_product, DirectProduct};
use super::subgroup::PcSubgroup;
use crate::error::{Error, Result};

/// Homomorphism between polycyclic groups, given by the images of the
/// domain generators and checked against every defining relation.
#[derive(Debug, Clone)]
pub struct PcHom {
    domain: Arc<PcGroup>,
    codomain: Arc<PcGroup>,
    images: Vec<PcElement>,
    graph: OnceLock<Graph>,
}

/// The graph `{(f(x), x)}` inside `codomain x domain`.
#[derive(Debug, Clone)]
struct Graph {
    product: DirectProduct,
    sub: PcSubgroup,
}

/// Hirsch lengths `h(domain) = h(kernel) + h(image)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RankCertificate {
    pub domain: usize,
    pub kernel: usize,
    pub image: usize,
}

impl RankCertificate {
    pub fn holds(&self) -> bool {
        self.domain == self.kernel + self.image
    }
}

impl PcHom {
    pub fn new(domain: &Arc<PcGroup>, codomain: &Arc<PcGroup>, images: Vec<PcElement>) -> Result<PcHom> {
        if images.len() != domain.len() || images.iter().any(|x| !codomain.contains(x)) {
            return Err(Error::GroupMismatch);
        }
        let h = PcHom { domain: domain.clone(), codomain: codomain.clone(), images, graph: OnceLock::new() };
        h.verify()?;
        Ok(h)
    }

    /// Images given as words over the codomain generators.
    pub fn from_words(domain: &Arc<PcGroup>, codomain: &Arc<PcGroup>, words: &[&str]) -> Result<PcHom> {
        let images = words.iter().map(|w| codomain.parse(w)).collect::<Result<Vec<_>>>()?;
        PcHom::new(domain, codomain, images)
    }

    pub(crate) fn new_unchecked(domain: &Arc<PcGroup>, codomain: &Arc<PcGroup>, images: Vec<PcElement>) -> PcHom {
        PcHom { domain: domain.clone(), codomain: codomain.clone(), images, graph: OnceLock::new() }
    }

    pub fn identity(g: &Arc<PcGroup>) -> PcHom {
        PcHom::new_unchecked(g, g, g.generators())
    }

    pub fn domain(&self) -> &Arc<PcGroup> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<PcGroup> {
        &self.codomain
    }

    pub fn images(&self) -> &[PcElement] {
        &self.images
    }

    /// Check every defining relation of the domain.
    pub fn verify(&self) -> Result<()> {
        let d = &self.domain;
        let c = &self.codomain;
        for rel in d.defining_relations() {
            let (lhs, rhs) = match &rel {
                DefiningRelation::Conjugate { j, i, value } => {
                    (c.conj(&self.images[*j], &self.images[*i]), self.apply(value))
                }
                DefiningRelation::Power { i, order, value } => (c.pow(&self.images[*i], order), self.apply(value)),
            };
            if lhs != rhs {
                return Err(Error::RelationFails {
                    relation: d.describe_relation(&rel),
                    image: format!("{} vs {}", c.fmt_elem(&lhs), c.fmt_elem(&rhs)),
                });
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &PcElement) -> PcElement {
        let c = &self.codomain;
        let mut r = c.identity();
        for (i, e) in x.0.iter().enumerate() {
            if !e.is_zero() {
                r = c.mul(&r, &c.pow(&self.images[i], e));
            }
        }
        r
    }

    pub fn compose(&self, after: &PcHom) -> Result<PcHom> {
        if !Arc::ptr_eq(&self.codomain, &after.domain) {
            return Err(Error::GroupMismatch);
        }
        let images = self.images.iter().map(|x| after.apply(x)).collect();
        Ok(PcHom::new_unchecked(&self.domain, &after.codomain, images))
    }

    fn graph(&self) -> &Graph {
        self.graph.get_or_init(|| {
            let product = direct_product(&[&self.codomain, &self.domain]);
            let gens: Vec<PcElement> = (0..self.domain.len())
                .map(|i| product.pair(&self.images[i], &self.domain.generator(i)))
                .collect();
            let sub = PcSubgroup::new(&product.group, &gens);
            Graph { product, sub }
        })
    }

    pub fn image(&self) -> PcSubgroup {
        PcSubgroup::new(&self.codomain, &self.images)
    }

    /// Subgroup image of a domain subgroup.
    pub fn image_of(&self, s: &PcSubgroup) -> PcSubgroup {
        let gens: Vec<PcElement> = s.generators().iter().map(|x| self.apply(x)).collect();
        PcSubgroup::new(&self.codomain, &gens)
    }

    pub fn kernel(&self) -> PcSubgroup {
        let g = self.graph();
        graph_kernel(&g.product, &g.sub, &self.domain)
    }

    /// Full preimage of a codomain subgroup.
    pub fn preimage(&self, u: &PcSubgroup) -> PcSubgroup {
        let g = self.graph();
        let mut gens = g.sub.generators();
        gens.extend(u.generators().iter().map(|x| g.product.pair(x, &self.domain.identity())));
        let sub = PcSubgroup::new(&g.product.group, &gens);
        graph_kernel(&g.product, &sub, &self.domain)
    }

    /// Some `x` with `f(x) = y`, if `y` is in the image.
    pub fn preimage_of(&self, y: &PcElement) -> Option<PcElement> {
        let g = self.graph();
        let p = &g.product;
        let n_cod = self.codomain.len();
        // (y, 1) = (f(x0), x0) * (1, z) after sifting
        let (_, x) = g.sub.sift(&p.pair(y, &self.domain.identity()));
        if x.0[..n_cod].iter().any(|e| !e.is_zero()) {
            return None;
        }
        let z = p.component(&x, 1);
        Some(self.domain.inverse(&z))
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().is_whole()
    }

    pub fn rank_certificate(&self) -> RankCertificate {
        RankCertificate {
            domain: self.domain.hirsch_length(),
            kernel: self.kernel().hirsch_length(),
            image: self.image().hirsch_length(),
        }
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        self.domain
            .gens()
            .iter()
            .zip(&self.images)
            .map(|(g, x)| (g.clone(), self.codomain.fmt_elem(x)))
            .collect()
    }
}

fn graph_kernel(p: &DirectProduct, sub: &PcSubgroup, domain: &Arc<PcGroup>) -> PcSubgroup {
    let n_cod = p.offsets[1];
    let gens: Vec<PcElement> = sub
        .generators()
        .into_iter()
        .filter(|x| x.leader().is_some_and(|l| l >= n_cod))
        .map(|x| p.component(&x, 1))
        .collect();
    PcSubgroup::new(domain, &gens)
}

/// Kernel of a map defined on the induced sequence of `h` (assumed to extend
/// to a homomorphism).
pub fn kernel_of_map(h: &PcSubgroup, target: &Arc<PcGroup>, values: &[PcElement]) -> PcSubgroup {
    let dom = h.group();
    let product = direct_product(&[target, dom]);
    let gens: Vec<PcElement> = h.generators().iter().zip(values).map(|(s, v)| product.pair(v, s)).collect();
    let sub = PcSubgroup::new(&product.group, &gens);
    graph_kernel(&product, &sub, dom)
}
