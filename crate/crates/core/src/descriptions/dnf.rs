use thiserror::Error;

use super::Description;

pub const DEFAULT_DNF_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("description expands to more than {limit} disjuncts")]
pub struct DnfLimitExceeded {
    pub limit: usize,
}

/// Disjunctive normal form: disjunction-free descriptions whose disjunction
/// is equivalent to `d`, in source order (leftmost alternatives vary
/// slowest).
pub fn to_dnf(d: &Description, limit: usize) -> Result<Vec<Description>, DnfLimitExceeded> {
    let out = match d {
        Description::Type(_) | Description::Var(_) => vec![d.clone()],
        Description::Feat(f, v) => to_dnf(v, limit)?.into_iter().map(|v| Description::Feat(*f, Box::new(v))).collect(),
        Description::Disj(ds) => {
            let mut out = Vec::new();
            for d in ds {
                out.extend(to_dnf(d, limit)?);
                if out.len() > limit {
                    return Err(DnfLimitExceeded { limit });
                }
            }
            out
        }
        Description::Conj(ds) => product(ds, limit)?.into_iter().map(Description::Conj).collect(),
        Description::List(items, tail) => {
            let mut parts = items.clone();
            parts.extend(tail.as_deref().cloned());
            product(&parts, limit)?
                .into_iter()
                .map(|mut ds| {
                    let tail = tail.is_some().then(|| Box::new(ds.pop().unwrap()));
                    Description::List(ds, tail)
                })
                .collect()
        }
    };
    if out.len() > limit {
        return Err(DnfLimitExceeded { limit });
    }
    Ok(out)
}

fn product(ds: &[Description], limit: usize) -> Result<Vec<Vec<Description>>, DnfLimitExceeded> {
    let mut acc: Vec<Vec<Description>> = vec![Vec::new()];
    for d in ds {
        let alts = to_dnf(d, limit)?;
        if acc.len() * alts.len() > limit {
            return Err(DnfLimitExceeded { limit });
        }
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                alts.iter().map(move |a| {
                    let mut v = prefix.clone();
                    v.push(a.clone());
                    v
                })
            })
            .collect();
    }
    Ok(acc)
}
