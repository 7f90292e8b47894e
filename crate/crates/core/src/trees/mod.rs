//! Automatic trees and dags of bounded height: unfolding, the tree of an
//! equivalence structure, the ambiguity gadgets of height 2 and the tower
//! step, and isomorphism checks.

mod gadgets;
mod iso;
mod unfold;

use crate::error::{Error, Result};
use crate::fo::{validate_dag, validate_tree, Presentation};

pub use gadgets::{build_d2, build_forest_height1, tower_step};
pub use iso::{ahu_canonical, iso_bounded, iso_height1, materialize, IsoCaps};
pub use unfold::{children_of, extract_component, roots_of, tree_from_equiv, unfold_dag};

/// A word of a presentation, one letter name per entry.
pub type Word = Vec<String>;

/// A dag with edge relation `E` and no path longer than `height`.
#[derive(Clone, Debug)]
pub struct DagPresentation {
    pub pres: Presentation,
    pub height: usize,
    /// For the gadget tower: roots are `⊗_k(a⁺) ∪ b*` with this `k`.
    pub a_tracks: Option<usize>,
}

impl DagPresentation {
    pub fn new(pres: Presentation, height: usize) -> Result<DagPresentation> {
        if !validate_dag(&pres, height)? {
            return Err(Error::Validation(format!("E is not a rooted dag of height at most {height}")));
        }
        Ok(DagPresentation { pres, height, a_tracks: None })
    }

    pub fn unchecked(pres: Presentation, height: usize) -> DagPresentation {
        DagPresentation { pres, height, a_tracks: None }
    }

    pub fn validate(&self) -> Result<bool> {
        validate_dag(&self.pres, self.height)
    }
}

/// A forest (no `root`) or a tree with the given root word; edges go from
/// parent to child.
#[derive(Clone, Debug)]
pub struct TreePresentation {
    pub pres: Presentation,
    pub height: usize,
    pub root: Option<Word>,
}

impl TreePresentation {
    /// Checks the tree axioms at `height`.
    pub fn new(pres: Presentation, height: usize, root: Word) -> Result<TreePresentation> {
        if !validate_tree(&pres, height)? {
            return Err(Error::Validation(format!("E is not a tree of height at most {height}")));
        }
        Ok(TreePresentation { pres, height, root: Some(root) })
    }

    pub fn validate(&self) -> Result<bool> {
        match self.root {
            Some(_) => validate_tree(&self.pres, self.height),
            None => crate::fo::validate_forest(&self.pres, self.height),
        }
    }

    pub fn root(&self) -> Result<&Word> {
        self.root.as_ref().ok_or_else(|| Error::Parameters("a forest has no single root".into()))
    }
}
