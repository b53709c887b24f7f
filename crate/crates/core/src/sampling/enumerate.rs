use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{LabeledTree, PlaneTree};

/// Largest `n` accepted by [`enumerate`].
pub const MAX_ENUMERATION_N: usize = 8;

/// Named tree classes for enumeration and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreePredicate {
    All,
    WPlus,
    WCirc,
    H,
    Nice,
}

impl TreePredicate {
    pub fn holds(self, lt: &LabeledTree) -> bool {
        let class = lt.classify();
        match self {
            TreePredicate::All => true,
            TreePredicate::WPlus => class.in_wplus,
            TreePredicate::WCirc => class.in_wcirc,
            TreePredicate::H => class.in_h,
            TreePredicate::Nice => class.nice_eq,
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "all" => Some(Self::All),
            "wplus" => Some(Self::WPlus),
            "wcirc" => Some(Self::WCirc),
            "h" => Some(Self::H),
            "nice" => Some(Self::Nice),
            _ => None,
        }
    }
}

/// All plane trees with `n` edges, in decreasing lexicographic order of
/// their child-count words.
pub fn enumerate_trees(n: usize) -> Vec<PlaneTree> {
    fn rec(word: &mut Vec<usize>, open: usize, left: usize, out: &mut Vec<PlaneTree>) {
        // `open` counts child slots still to be filled.
        if open == 0 {
            if left == 0 {
                out.push(PlaneTree::from_child_counts(word.clone()).expect("valid word"));
            }
            return;
        }
        for k in (0..=left).rev() {
            word.push(k);
            rec(word, open - 1 + k, left - k, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, n, &mut out);
    out
}

/// Every labeled tree with `n` edges satisfying `pred`, trees in the order
/// of [`enumerate_trees`] and labelings in lexicographic order of their
/// preorder increments.
pub fn enumerate<F>(n: usize, mut pred: F) -> Result<Vec<LabeledTree>>
where
    F: FnMut(&LabeledTree) -> bool,
{
    if n > MAX_ENUMERATION_N {
        return Err(Error::BudgetExceeded {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    let mut out = Vec::new();
    for tree in enumerate_trees(n) {
        let mut incs = vec![-1i32; n];
        loop {
            let mut labels = vec![0; n + 1];
            for v in 1..=n {
                labels[v] = labels[tree.parent(v).expect("non-root")] + incs[v - 1];
            }
            let lt = LabeledTree::new(tree.clone(), labels)?;
            if pred(&lt) {
                out.push(lt);
            }
            // Odometer over {-1, 0, 1}^n.
            let Some(pos) = incs.iter().rposition(|&d| d < 1) else {
                break;
            };
            incs[pos] += 1;
            incs[pos + 1..].iter_mut().for_each(|d| *d = -1);
        }
    }
    Ok(out)
}
