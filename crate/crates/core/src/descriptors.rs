//! JSON descriptors for groups, modules, actions, cochains and the larger
//! composite inputs consumed by the command line.

use crate::abelian::{AbelianGroup, Elt};
use crate::action::GAction;
use crate::cochain::Cochain;
use crate::error::CoreError;
use crate::group::FiniteGroup;
use crate::intlin::IntMat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GroupDescriptor {
    Cyclic { order: usize },
    Product { factors: Vec<GroupDescriptor> },
    Table { mul: Vec<Vec<usize>> },
    Dihedral { order: usize },
    Quaternion,
}

impl GroupDescriptor {
    pub fn build(&self) -> Result<FiniteGroup, CoreError> {
        match self {
            GroupDescriptor::Cyclic { order } => {
                if *order == 0 {
                    return Err(CoreError::InvalidGroup("order must be ≥ 1".into()));
                }
                Ok(FiniteGroup::cyclic(*order))
            }
            GroupDescriptor::Product { factors } => {
                let mut acc = FiniteGroup::cyclic(1);
                for f in factors {
                    acc = FiniteGroup::product(&acc, &f.build()?);
                }
                Ok(acc)
            }
            GroupDescriptor::Table { mul } => FiniteGroup::from_table(mul.clone()),
            GroupDescriptor::Dihedral { order } => {
                if *order < 2 || order % 2 != 0 {
                    return Err(CoreError::InvalidGroup("dihedral order must be even ≥ 2".into()));
                }
                Ok(FiniteGroup::dihedral(order / 2))
            }
            GroupDescriptor::Quaternion => Ok(FiniteGroup::quaternion()),
        }
    }

    /// Parse shorthand like "cyclic:4", "product:2x2", "dihedral:8", "q8".
    pub fn parse(spec: &str) -> Result<Self, CoreError> {
        let lower = spec.to_ascii_lowercase();
        if lower == "q8" || lower == "quaternion" {
            return Ok(GroupDescriptor::Quaternion);
        }
        let (kind, arg) = lower
            .split_once(':')
            .ok_or_else(|| CoreError::Invalid(format!("bad group spec '{spec}'")))?;
        match kind {
            "cyclic" => Ok(GroupDescriptor::Cyclic {
                order: arg.parse().map_err(|_| CoreError::Invalid(format!("bad order '{arg}'")))?,
            }),
            "product" => {
                let factors = arg
                    .split('x')
                    .map(|s| {
                        s.parse::<usize>()
                            .map(|order| GroupDescriptor::Cyclic { order })
                            .map_err(|_| CoreError::Invalid(format!("bad factor '{s}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(GroupDescriptor::Product { factors })
            }
            "dihedral" => Ok(GroupDescriptor::Dihedral {
                order: arg.parse().map_err(|_| CoreError::Invalid(format!("bad order '{arg}'")))?,
            }),
            _ => Err(CoreError::Invalid(format!("unknown group kind '{kind}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleDescriptor {
    #[serde(default)]
    pub rank: usize,
    #[serde(default)]
    pub torsion: Vec<i128>,
}

impl ModuleDescriptor {
    pub fn build(&self) -> Result<AbelianGroup, CoreError> {
        AbelianGroup::new(self.rank, self.torsion.clone())
    }

    /// Parse shorthand like "torsion:2", "torsion:2,4", "free:2", "free:1+torsion:2".
    pub fn parse(spec: &str) -> Result<Self, CoreError> {
        let mut rank = 0usize;
        let mut torsion = Vec::new();
        for part in spec.split('+') {
            let (kind, arg) = part
                .split_once(':')
                .ok_or_else(|| CoreError::Invalid(format!("bad module spec '{spec}'")))?;
            match kind {
                "free" => {
                    rank += arg
                        .parse::<usize>()
                        .map_err(|_| CoreError::Invalid(format!("bad rank '{arg}'")))?
                }
                "torsion" => {
                    for m in arg.split(',') {
                        torsion.push(
                            m.parse::<i128>()
                                .map_err(|_| CoreError::Invalid(format!("bad modulus '{m}'")))?,
                        );
                    }
                }
                _ => return Err(CoreError::Invalid(format!("unknown module kind '{kind}'"))),
            }
        }
        Ok(ModuleDescriptor { rank, torsion })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ActionDescriptor {
    /// matrices keyed by group element index; missing elements act trivially
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<i128>>>,
}

impl ActionDescriptor {
    pub fn build(
        &self,
        group: Arc<FiniteGroup>,
        module: AbelianGroup,
    ) -> Result<GAction, CoreError> {
        let d = module.dim();
        let mut mats = vec![IntMat::identity(d); group.order()];
        for (key, rows) in &self.matrices {
            let idx: usize = key
                .parse()
                .map_err(|_| CoreError::Invalid(format!("bad element index '{key}'")))?;
            if idx >= group.order() {
                return Err(CoreError::Invalid(format!("element index {idx} out of range")));
            }
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(CoreError::DimensionMismatch(format!(
                    "matrix for element {idx} must be {d}×{d}"
                )));
            }
            mats[idx] = IntMat::from_rows(rows);
        }
        GAction::new(group, module, mats)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainDescriptor {
    pub degree: usize,
    /// keys "(g1,...,gp)" over non-identity tuples; missing tuples are 0
    #[serde(default)]
    pub values: BTreeMap<String, Elt>,
}

impl CochainDescriptor {
    pub fn build(&self, action: &Arc<GAction>) -> Result<Cochain, CoreError> {
        let mut c = Cochain::zero(action, self.degree);
        for (key, v) in &self.values {
            let args = parse_tuple(key, self.degree)?;
            if args.iter().any(|&g| g >= action.group.order()) {
                return Err(CoreError::Invalid(format!("tuple {key} out of range")));
            }
            if args.iter().any(|&g| g == 0) {
                if v.iter().any(|&x| x != 0) {
                    return Err(CoreError::Invalid(format!(
                        "normalized cochain cannot be nonzero at {key}"
                    )));
                }
                continue;
            }
            if v.len() != action.module.dim() {
                return Err(CoreError::DimensionMismatch(format!(
                    "value at {key} has wrong module dimension"
                )));
            }
            c.set(&args, v.clone());
        }
        Ok(c)
    }

    pub fn from_cochain(c: &Cochain) -> Self {
        let n = c.action.group.order();
        let mut values = BTreeMap::new();
        for t in 0..crate::cochain::free_tuples(n, c.degree) {
            let args = crate::cochain::index_tuple(t, n, c.degree);
            let v = c.value(&args);
            if v.iter().any(|&x| x != 0) {
                let key = format!(
                    "({})",
                    args.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",")
                );
                values.insert(key, v);
            }
        }
        CochainDescriptor { degree: c.degree, values }
    }
}

pub fn parse_tuple(key: &str, arity: usize) -> Result<Vec<usize>, CoreError> {
    let inner = key.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = if inner.is_empty() {
        vec![]
    } else {
        inner.split(',').collect()
    };
    if parts.len() != arity {
        return Err(CoreError::Invalid(format!(
            "tuple '{key}' must have {arity} entries"
        )));
    }
    parts
        .iter()
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CoreError::Invalid(format!("bad tuple entry '{s}'")))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorSystemDescriptor {
    pub base: GroupDescriptor,
    pub fiber: GroupDescriptor,
    /// S(g) as permutations keyed by base element index; missing = identity
    #[serde(default)]
    pub s: BTreeMap<String, Vec<usize>>,
    /// ω keyed by "(g,g')"; missing = identity element
    #[serde(default)]
    pub omega: BTreeMap<String, usize>,
}

impl FactorSystemDescriptor {
    pub fn build(&self) -> Result<crate::extension::FactorSystem, CoreError> {
        let base = Arc::new(self.base.build()?);
        let fiber = Arc::new(self.fiber.build()?);
        let id: Vec<usize> = (0..fiber.order()).collect();
        let mut act = vec![id; base.order()];
        for (key, perm) in &self.s {
            let idx: usize = key
                .parse()
                .map_err(|_| CoreError::Invalid(format!("bad element index '{key}'")))?;
            if idx >= base.order() {
                return Err(CoreError::Invalid(format!("element index {idx} out of range")));
            }
            act[idx] = perm.clone();
        }
        let mut omega = vec![0usize; base.order() * base.order()];
        for (key, &v) in &self.omega {
            let t = parse_tuple(key, 2)?;
            if t[0] >= base.order() || t[1] >= base.order() {
                return Err(CoreError::Invalid(format!("tuple {key} out of range")));
            }
            omega[t[0] * base.order() + t[1]] = v;
        }
        crate::extension::FactorSystem::new(base, fiber, act, omega)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossedModuleDescriptor {
    pub nhat: GroupDescriptor,
    pub g: GroupDescriptor,
    pub alpha: Vec<usize>,
    /// Ŝ(g) as permutations of N̂ keyed by element index of G; missing = identity
    #[serde(default)]
    pub shat: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransgressionDescriptor {
    pub group: GroupDescriptor,
    pub normal: Vec<usize>,
    pub module: ModuleDescriptor,
    #[serde(default)]
    pub action: ActionDescriptor,
    pub f: CochainDescriptor,
}
