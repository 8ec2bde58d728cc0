//! Generalized numbers: moderate nets modulo negligible ones.

use crate::gauges::{algebra_order, ideal_compatible, is_moderate, is_negligible_num, AlgebraSpec, Gauge};
use crate::index_core::{eventually, IndexSet, Net, NetRepr, Predicate, Verdict};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A class [x] in R̃^d(B, Z), stored by one representative per component.
#[derive(Clone, Debug)]
pub struct GenNumber {
    rep: Vec<Net>,
    spec: AlgebraSpec,
}

impl GenNumber {
    pub fn new(rep: Net, spec: AlgebraSpec) -> Result<GenNumber> {
        GenNumber::vector(alloc::vec![rep], spec)
    }

    pub fn vector(rep: Vec<Net>, spec: AlgebraSpec) -> Result<GenNumber> {
        if rep.is_empty() {
            return Err(Error::Argument("a generalized number needs a component".into()));
        }
        for (k, x) in rep.iter().enumerate() {
            let v = is_moderate(x, &spec.b)?;
            if !v.holds() {
                return Err(Error::Precondition(format!(
                    "component {k} is not moderate in {} ({})",
                    spec.b,
                    v.status.name()
                )));
            }
        }
        Ok(GenNumber { rep, spec })
    }

    pub fn parse(text: &str, spec: AlgebraSpec) -> Result<GenNumber> {
        let net = Net::parse(text)?.with_index(spec.b.index().clone());
        GenNumber::new(net, spec)
    }

    pub fn zero(spec: AlgebraSpec) -> GenNumber {
        let net = Net::constant(0).with_index(spec.b.index().clone());
        GenNumber {
            rep: alloc::vec![net],
            spec,
        }
    }

    pub fn rep(&self) -> &Net {
        &self.rep[0]
    }
    pub fn components(&self) -> &[Net] {
        &self.rep
    }
    pub fn dim(&self) -> usize {
        self.rep.len()
    }
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    fn same_shape(&self, other: &GenNumber) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Argument(format!(
                "algebras differ: {} vs {}",
                self.spec, other.spec
            )));
        }
        if self.dim() != other.dim() {
            return Err(Error::Argument("dimensions differ".into()));
        }
        Ok(())
    }

    fn zip(&self, other: &GenNumber, f: impl Fn(&Net, &Net) -> Result<Net>) -> Result<GenNumber> {
        self.same_shape(other)?;
        let rep = self
            .rep
            .iter()
            .zip(&other.rep)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<Net>>>()?;
        Ok(GenNumber {
            rep,
            spec: self.spec.clone(),
        })
    }
}

impl fmt::Display for GenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rep
            .iter()
            .map(|n| match n.repr() {
                NetRepr::Symbolic(e) => format!("{e}"),
                other => format!("{other:?}"),
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub fn gn_add(a: &GenNumber, b: &GenNumber) -> Result<GenNumber> {
    a.zip(b, |x, y| x.add(y))
}

/// Componentwise product; moderate because gauges are closed under products.
pub fn gn_mul(a: &GenNumber, b: &GenNumber) -> Result<GenNumber> {
    a.zip(b, |x, y| x.mul(y))
}

pub fn gn_neg(a: &GenNumber) -> GenNumber {
    GenNumber {
        rep: a.rep.iter().map(|x| x.neg()).collect(),
        spec: a.spec.clone(),
    }
}

pub fn gn_sub(a: &GenNumber, b: &GenNumber) -> Result<GenNumber> {
    gn_add(a, &gn_neg(b))
}

/// a ∼_Z b: the difference is Z-negligible in every component.
pub fn gn_eq(a: &GenNumber, b: &GenNumber) -> Result<Verdict> {
    a.same_shape(b)?;
    let mut parts = Vec::with_capacity(a.dim());
    for (x, y) in a.rep.iter().zip(&b.rep) {
        parts.push(is_negligible_num(&x.sub(y)?, &a.spec.z)?);
    }
    Ok(Verdict::all(parts))
}

/// Whether the stored representative is moderate in the smaller gauge.
pub fn is_bounded_by(a: &GenNumber, b0: &Gauge) -> Result<Verdict> {
    if !ideal_compatible(b0, &a.spec.b)?.holds() {
        return Err(Error::Argument(format!(
            "R_M({b0}) is not contained in R_M({})",
            a.spec.b
        )));
    }
    let mut parts = Vec::with_capacity(a.dim());
    for x in &a.rep {
        parts.push(is_moderate(x, b0)?);
    }
    Ok(Verdict::all(parts))
}

/// The bar morphism into a smaller algebra.
pub fn bar_project(a: &GenNumber, target: &AlgebraSpec) -> Result<GenNumber> {
    let order = algebra_order(target, &a.spec)?;
    if !order.holds() {
        return Err(Error::Precondition(format!(
            "{target} is not below {} in the algebra order",
            a.spec
        )));
    }
    let bounded = is_bounded_by(a, &target.b)?;
    if !bounded.holds() {
        return Err(Error::Precondition(format!(
            "{a} is not bounded by {} ({})",
            target.b,
            bounded.status.name()
        )));
    }
    Ok(GenNumber {
        rep: a.rep.clone(),
        spec: target.clone(),
    })
}

/// A compactly supported generalized point: x_ε ∈ K for small ε.
#[derive(Clone, Debug)]
pub struct CompactPoint {
    rep: Net,
    hull: (f64, f64),
}

impl CompactPoint {
    pub fn new(rep: Net, hull: (f64, f64)) -> Result<CompactPoint> {
        if !(hull.0 <= hull.1) {
            return Err(Error::Argument("empty compact hull".into()));
        }
        let probe = rep.clone();
        let (lo, hi) = hull;
        let pred = Predicate::closure(move |e| probe.value(e).map_or(false, |v| v >= lo && v <= hi));
        let index = match rep.index() {
            IndexSet::NaturalsFrechet => IndexSet::NaturalsFrechet,
            _ => IndexSet::HalfOpenUnit,
        };
        let v = eventually(&index, &pred, 160)?;
        if !v.holds() {
            return Err(Error::Precondition(format!(
                "representative does not stay in [{lo}, {hi}] ({})",
                v.status.name()
            )));
        }
        Ok(CompactPoint { rep, hull })
    }

    pub fn rep(&self) -> &Net {
        &self.rep
    }
    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }
}
