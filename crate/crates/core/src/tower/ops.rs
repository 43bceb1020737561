use super::hom::{HomRule, TowerHom};
use super::system::{TailRule, Tower};
use crate::error::{Error, Result};

/// `F[r]`: level `n` is `F_{n+r}`.
pub fn shift(f: &Tower, r: usize) -> Result<Tower> {
    if r == 0 {
        return Ok(f.clone());
    }
    let horizon = f.horizon().saturating_sub(r);
    Tower::from_rule(
        f.l(),
        TailRule::ShiftOf {
            parent: f.clone(),
            r,
        },
        horizon,
    )
}

/// `F[r] → F` built from the composites `F_{n+r} → F_n`.
pub fn natural_map(f: &Tower, r: usize) -> Result<TowerHom> {
    if r == 0 {
        return Ok(TowerHom::identity(f));
    }
    Ok(TowerHom::from_rule(
        &shift(f, r)?,
        f,
        HomRule::Natural { r },
    ))
}

/// Levelwise `F_n / l^k`.
pub fn mod_power(f: &Tower, k: u32) -> Result<Tower> {
    Tower::from_rule(
        f.l(),
        TailRule::QuotientOf {
            parent: f.clone(),
            k,
        },
        f.horizon(),
    )
}

/// `F ↠ F / l^k`.
pub fn mod_power_projection(f: &Tower, k: u32) -> Result<TowerHom> {
    let q = mod_power(f, k)?;
    Ok(TowerHom::from_rule(
        f,
        &q,
        HomRule::QuotientProjection { k },
    ))
}

/// Levelwise `F_n / l^{n+1}`.
pub fn truncation(f: &Tower) -> Result<Tower> {
    Tower::from_rule(
        f.l(),
        TailRule::TruncationOf { parent: f.clone() },
        f.horizon(),
    )
}

pub fn truncation_projection(f: &Tower) -> Result<TowerHom> {
    let t = truncation(f)?;
    Ok(TowerHom::from_rule(f, &t, HomRule::TruncationProjection))
}

/// Levelwise `im(F_{n+s} → F_n)` with its inclusion into `F`.
pub fn stable_image(f: &Tower, s: usize) -> Result<(Tower, TowerHom)> {
    if s == 0 {
        return Ok((f.clone(), TowerHom::identity(f)));
    }
    let img = Tower::from_rule(
        f.l(),
        TailRule::StableImageOf {
            parent: f.clone(),
            s,
        },
        f.horizon().saturating_sub(s),
    )?;
    let inc = TowerHom::from_rule(&img, f, HomRule::StableImageInclusion { s });
    Ok((img, inc))
}

/// `F[s] ↠ im(F_{n+s} → F_n)`.
pub fn stable_image_corestriction(f: &Tower, s: usize) -> Result<(Tower, TowerHom)> {
    if s == 0 {
        return Ok((f.clone(), TowerHom::identity(f)));
    }
    let (img, _) = stable_image(f, s)?;
    let onto = TowerHom::from_rule(&shift(f, s)?, &img, HomRule::StableImageCorestriction { s });
    Ok((img, onto))
}

/// `F ⊕ G` with its structure maps.
#[derive(Clone, Debug)]
pub struct SumTower {
    pub tower: Tower,
    pub inj: [TowerHom; 2],
    pub proj: [TowerHom; 2],
}

pub fn direct_sum(f: &Tower, g: &Tower) -> Result<SumTower> {
    if f.l() != g.l() {
        return Err(Error::PrimeMismatch {
            left: f.l(),
            right: g.l(),
        });
    }
    let tower = Tower::from_rule(
        f.l(),
        TailRule::SumOf {
            left: f.clone(),
            right: g.clone(),
        },
        f.horizon().max(g.horizon()),
    )?;
    let inj = [0, 1].map(|index| {
        let part = if index == 0 { f } else { g };
        TowerHom::from_rule(part, &tower, HomRule::SumInjection { index })
    });
    let proj = [0, 1].map(|index| {
        let part = if index == 0 { f } else { g };
        TowerHom::from_rule(&tower, part, HomRule::SumProjection { index })
    });
    Ok(SumTower { tower, inj, proj })
}

/// `f ⊕ g` between the direct-sum towers of the endpoints.
pub fn hom_direct_sum(f: &TowerHom, g: &TowerHom) -> Result<(TowerHom, SumTower, SumTower)> {
    let s = direct_sum(f.source(), g.source())?;
    let t = direct_sum(f.target(), g.target())?;
    let h = TowerHom::from_rule(&s.tower, &t.tower, HomRule::DirectSum(f.clone(), g.clone()));
    Ok((h, s, t))
}

fn window(f: &TowerHom) -> usize {
    f.source().horizon().max(f.target().horizon())
}

/// Levelwise kernel with its inclusion.
pub fn levelwise_kernel(f: &TowerHom) -> Result<(Tower, TowerHom)> {
    let k = Tower::from_rule(
        f.source().l(),
        TailRule::KernelOf { hom: f.clone() },
        window(f),
    )?;
    let inc = TowerHom::from_rule(&k, f.source(), HomRule::KernelInclusion { hom: f.clone() });
    Ok((k, inc))
}

/// Levelwise image with its inclusion into the target and the corestriction from the source.
pub fn levelwise_image(f: &TowerHom) -> Result<(Tower, TowerHom, TowerHom)> {
    let i = Tower::from_rule(
        f.source().l(),
        TailRule::ImageOf { hom: f.clone() },
        window(f),
    )?;
    let inc = TowerHom::from_rule(&i, f.target(), HomRule::ImageInclusion { hom: f.clone() });
    let onto = TowerHom::from_rule(
        f.source(),
        &i,
        HomRule::ImageCorestriction { hom: f.clone() },
    );
    Ok((i, inc, onto))
}

/// Levelwise cokernel with its projection.
pub fn levelwise_cokernel(f: &TowerHom) -> Result<(Tower, TowerHom)> {
    let c = Tower::from_rule(
        f.source().l(),
        TailRule::CokernelOf { hom: f.clone() },
        window(f),
    )?;
    let proj = TowerHom::from_rule(
        f.target(),
        &c,
        HomRule::CokernelProjection { hom: f.clone() },
    );
    Ok((c, proj))
}
