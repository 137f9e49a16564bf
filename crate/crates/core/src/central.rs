//! Generalized central products: the direct product of the factors modulo
//! the identification of a common central subgroup.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pc::{
    direct_product, intersect_normal, DirectProduct, PcElement, PcGroup, PcHom, PcSubgroup, Quotient, RankCertificate,
};

#[derive(Debug, Clone)]
pub struct CentralProduct {
    pub result: Arc<PcGroup>,
    pub factors: Vec<Arc<PcGroup>>,
    pub core: Arc<PcGroup>,
    pub central_maps: Vec<PcHom>,
    pub canonical_maps: Vec<PcHom>,
    product: DirectProduct,
    quotient: Quotient,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EmbeddingCertificate {
    pub factor: String,
    pub rank: RankCertificate,
    pub injective: bool,
}

impl CentralProduct {
    pub fn new(name: &str, factors: Vec<Arc<PcGroup>>, core: Arc<PcGroup>, central_maps: Vec<PcHom>) -> Result<Self> {
        Self::with_extra_relators(name, factors, core, central_maps, &[])
    }

    /// Also quotient by the normal closure of `extra` (factor index, element);
    /// used to exhibit products whose factor maps fail to be injective.
    pub fn with_extra_relators(
        name: &str,
        factors: Vec<Arc<PcGroup>>,
        core: Arc<PcGroup>,
        central_maps: Vec<PcHom>,
        extra: &[(usize, PcElement)],
    ) -> Result<Self> {
        if factors.is_empty() || central_maps.len() != factors.len() {
            return Err(Error::Invalid("one central map per factor is required".into()));
        }
        for (k, (f, phi)) in factors.iter().zip(&central_maps).enumerate() {
            if !Arc::ptr_eq(phi.domain(), &core) || !Arc::ptr_eq(phi.codomain(), f) {
                return Err(Error::GroupMismatch);
            }
            if !phi.is_injective() {
                return Err(Error::NotInjective(format!("central map into factor {} ({})", k + 1, f.name())));
            }
            for c in core.generators() {
                let x = phi.apply(&c);
                for g in f.generators() {
                    let z = f.comm(&x, &g);
                    if !z.is_identity() {
                        return Err(Error::NotCentral {
                            element: format!("{} in {}", f.fmt_elem(&x), f.name()),
                            commutator: format!("[{}, {}] = {}", f.fmt_elem(&x), f.fmt_elem(&g), f.fmt_elem(&z)),
                        });
                    }
                }
            }
        }
        let refs: Vec<&Arc<PcGroup>> = factors.iter().collect();
        let product = direct_product(&refs);
        let pg = &product.group;
        let mut gens = Vec::new();
        for c in core.generators() {
            for i in 0..factors.len().saturating_sub(1) {
                let x = product.embed(i, &central_maps[i].apply(&c));
                let y = product.embed(i + 1, &central_maps[i + 1].apply(&c));
                gens.push(pg.mul(&x, &pg.inverse(&y)));
            }
        }
        for (i, x) in extra {
            gens.push(product.embed(*i, x));
        }
        let n = PcSubgroup::normal_closure(pg, &gens);
        let quotient = Quotient::new_unchecked(&n, name);
        let result = quotient.group.clone();
        let canonical_maps = factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let imgs = f.generators().iter().map(|g| quotient.project(&product.embed(i, g))).collect();
                PcHom::new_unchecked(f, &result, imgs)
            })
            .collect();
        Ok(CentralProduct { result, factors, core, central_maps, canonical_maps, product, quotient })
    }

    /// Central product of the factors of an amalgam whose core is central in
    /// every factor.
    pub fn from_amalgam(a: &crate::amalgam::Amalgam, name: &str) -> Result<Self> {
        CentralProduct::new(name, a.factors().to_vec(), a.core().clone(), a.embeddings().to_vec())
    }

    pub fn direct_product(&self) -> &DirectProduct {
        &self.product
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    /// Injectivity of the canonical map of factor `i`, by kernel and Hirsch rank.
    pub fn verify_factor_embedding(&self, i: usize) -> EmbeddingCertificate {
        let mu = &self.canonical_maps[i];
        let rank = mu.rank_certificate();
        let injective = mu.is_injective() && rank.image == rank.domain;
        EmbeddingCertificate { factor: self.factors[i].name().to_string(), rank, injective }
    }

    /// `mu_i(phi_i(c)) = mu_j(phi_j(c))` for all core generators and factors.
    pub fn identification_holds(&self) -> bool {
        self.core.generators().iter().all(|c| {
            let first = self.canonical_maps[0].apply(&self.central_maps[0].apply(c));
            (1..self.factors.len()).all(|i| self.canonical_maps[i].apply(&self.central_maps[i].apply(c)) == first)
        })
    }

    /// Image of the core in the result.
    pub fn core_image(&self) -> PcSubgroup {
        let gens: Vec<PcElement> = self
            .core
            .generators()
            .iter()
            .map(|c| self.canonical_maps[0].apply(&self.central_maps[0].apply(c)))
            .collect();
        PcSubgroup::new(&self.result, &gens)
    }

    /// `image(mu_i) ∩ image(mu_j) = image(C)`; factor images are normal since
    /// distinct factors commute elementwise.
    pub fn intersection_is_core(&self, i: usize, j: usize) -> bool {
        let ii = self.canonical_maps[i].image();
        let jj = self.canonical_maps[j].image();
        intersect_normal(&ii, &jj) == self.core_image()
    }

    pub fn images_generate(&self) -> bool {
        let mut gens = Vec::new();
        for m in &self.canonical_maps {
            gens.extend(m.images().iter().cloned());
        }
        PcSubgroup::new(&self.result, &gens).is_whole()
    }

    pub fn nilpotency_class(&self) -> usize {
        self.result.class()
    }
}
