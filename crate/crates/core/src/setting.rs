//! A tower context with the character tables of `G`, `G_σ`, `G_τ` and the
//! choices of `ψ` attached to each involution.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cache::Cache;
use crate::chartable::{fusion, restrict, CharacterTable};
use crate::error::{Error, Result};
use crate::field::{build_tower, Fe};
use crate::gelfand_graev::{BesselTable, GelfandGraev};
use crate::matgroup::bruhat::NCharacter;
use crate::matgroup::tower::{build_context, Involution, TowerContext};
use crate::matgroup::FiniteGroup;

pub struct Setting {
    pub ctx: TowerContext,
    pub table: CharacterTable,
    pub t_sigma: CharacterTable,
    pub t_tau: CharacterTable,
    pub fuse_sigma: Vec<u32>,
    pub fuse_tau: Vec<u32>,
    pub seed: u64,
}

impl Setting {
    pub fn build(n: usize, p: u32, k: u32, budget: u64, seed: u64) -> Result<Setting> {
        let tower = Arc::new(build_tower(p, k)?);
        let ctx = build_context(n, tower, budget)?;
        Setting::from_context(ctx, seed)
    }

    pub fn from_context(ctx: TowerContext, seed: u64) -> Result<Setting> {
        Setting::from_context_cached(ctx, seed, &Cache::disabled())
    }

    pub fn build_cached(n: usize, p: u32, k: u32, budget: u64, seed: u64, cache: &Cache) -> Result<Setting> {
        let tower = Arc::new(build_tower(p, k)?);
        let ctx = build_context(n, tower, budget)?;
        Setting::from_context_cached(ctx, seed, cache)
    }

    pub fn from_context_cached(ctx: TowerContext, seed: u64, cache: &Cache) -> Result<Setting> {
        let table = cache.character_table(&ctx.g, seed)?.0;
        let t_sigma = cache.character_table(&ctx.g_sigma, seed)?.0;
        let t_tau = cache.character_table(&ctx.g_tau, seed)?.0;
        let fuse_sigma = fusion(&ctx.g_sigma, &ctx.g)?;
        let fuse_tau = fusion(&ctx.g_tau, &ctx.g)?;
        Ok(Setting { ctx, table, t_sigma, t_tau, fuse_sigma, fuse_tau, seed })
    }

    pub fn label(&self) -> String {
        format!("n={} E=F_{} F=F_{}", self.ctx.n, self.ctx.q() * self.ctx.q(), self.ctx.q())
    }

    pub fn p(&self) -> u32 {
        self.ctx.tower.p
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.ctx.g
    }

    pub fn sub_group(&self, iota: Involution) -> &FiniteGroup {
        self.ctx.g_iota(iota)
    }

    pub fn sub_table(&self, iota: Involution) -> &CharacterTable {
        match iota {
            Involution::Sigma => &self.t_sigma,
            Involution::Tau => &self.t_tau,
        }
    }

    pub fn fusion(&self, iota: Involution) -> &[u32] {
        match iota {
            Involution::Sigma => &self.fuse_sigma,
            Involution::Tau => &self.fuse_tau,
        }
    }

    /// `dim Hom_{G_ι}(π, 1)`.
    pub fn distinction(&self, pi: usize, iota: Involution) -> Result<u64> {
        let t = self.sub_table(iota);
        let res = restrict(&self.table.chars[pi], self.fusion(iota));
        let triv = t.constant(1);
        let m = t.inner(&res, &triv).ok_or_else(|| Error::Mismatch("restriction inner product".into()))?;
        if !m.is_integer() || m < BigRational::from_integer(0.into()) {
            return Err(Error::Multiplicity(format!("restriction multiplicity {m}")));
        }
        Ok(m.to_integer().try_into().unwrap())
    }

    /// `|G| / (|G_σ||G_τ|)`.
    pub fn main_constant(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.ctx.g.order()),
            BigInt::from(self.ctx.g_sigma.order()) * BigInt::from(self.ctx.g_tau.order()),
        )
    }

    /// `ψ` used for `λ_ι`: stable under the opposite involution and trivial on `N_ι`.
    pub fn psi(&self, iota: Involution, slots: Option<Vec<Fe>>) -> Result<NCharacter> {
        let kappa = iota.opposite();
        let chi = self.ctx.psi_on_n(kappa, slots)?;
        if !self.ctx.is_stable(&chi, kappa) || !self.ctx.is_trivial_on(&chi, iota) {
            return Err(Error::Invalid(format!(
                "character is not a {}-stable character of N(E)/N_{}",
                kappa.symbol(),
                iota.symbol()
            )));
        }
        Ok(chi)
    }

    pub fn gelfand_graev(&self, iota: Involution, slots: Option<Vec<Fe>>) -> Result<GelfandGraev<'_>> {
        GelfandGraev::new(&self.ctx.g, self.psi(iota, slots)?)
    }

    /// Every slot vector in `(E^×)^{n-1}` giving an admissible `ψ` for `λ_ι`.
    pub fn slot_sweep(&self, iota: Involution) -> Vec<Vec<Fe>> {
        let units: Vec<Fe> = self.ctx.tower.ext().units().collect();
        let k = self.ctx.n.saturating_sub(1);
        let mut out = Vec::new();
        for mut idx in 0..units.len().pow(k as u32) {
            let mut s = Vec::with_capacity(k);
            for _ in 0..k {
                s.push(units[idx % units.len()]);
                idx /= units.len();
            }
            if self.psi(iota, Some(s.clone())).is_ok() {
                out.push(s);
            }
        }
        out
    }
}

/// Bessel tables for every generic irreducible of `G` under one `ψ`.
pub struct BesselSet<'a> {
    pub gg: GelfandGraev<'a>,
    pub tables: Vec<Option<BesselTable>>,
}

impl<'a> BesselSet<'a> {
    pub fn new(gg: GelfandGraev<'a>, table: &CharacterTable) -> Result<BesselSet<'a>> {
        let mut tables = vec![None; table.len()];
        for b in gg.all_bessel(table)? {
            let pi = b.pi;
            tables[pi] = Some(b);
        }
        Ok(BesselSet { gg, tables })
    }

    pub fn generic(&self) -> impl Iterator<Item = &BesselTable> {
        self.tables.iter().flatten()
    }

    pub fn get(&self, pi: usize) -> Option<&BesselTable> {
        self.tables[pi].as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::DEFAULT_BUDGET;

    #[test]
    fn sweeps_are_nonempty_and_admissible() {
        let s = Setting::build(2, 3, 1, DEFAULT_BUDGET, 1).unwrap();
        for iota in [Involution::Sigma, Involution::Tau] {
            let sweep = s.slot_sweep(iota);
            // slots form a coset of F^× in E^×
            assert_eq!(sweep.len(), 2, "{iota:?}");
            assert!(s.psi(iota, None).is_ok());
        }
        assert_eq!(s.main_constant(), BigRational::new(5.into(), 4.into()));
    }
}
