//! Automatic linear orders: the run order `⊑`, shuffle sums through
//! `σ(A, E)`, the interval automata, the tower of automata `A^i` and a
//! bounded block analysis of the resulting orders.

mod blocks;
mod build;
mod order;
mod shuffle;

use crate::conv::AlphabetOrder;
use crate::error::{Error, Result};
use crate::nfa::Nfa;

pub use blocks::{block_profile, find_blocks, Block, BlockProfile};
pub use build::{
    build_base_a1, check_level_shape, expected_heads, head_language, lo_tower_step, poly_interval,
    poly_interval_letter, s_language, tail_first_letters, LevelAutomaton,
};
pub use order::{extract_fiber_order, runs_on, sq_order_presentation, OrderPresentation, RunSource};
pub use shuffle::{shuffle_automaton, sigma_between, sigma_color, sigma_language, sigma_neighbors};

/// Name of the order relation in an order presentation.
pub const ORDER_RELATION: &str = "leq";

pub(crate) const DOLLAR: &str = "$";
pub(crate) const SHARP: &str = "#";
pub(crate) const ZERO: &str = "0";
pub(crate) const ONE: &str = "1";
/// Letters that may appear in `E` and `D` of a shuffle.
pub(crate) const GAMMA: [&str; 5] = ["a", "b1", "b2", "b3", "#"];

/// The letter `$_j`.
pub fn dollar_n(j: usize) -> String {
    format!("${j}")
}

/// `Σ_i` in increasing order: `$ < $1 < ⋯ < $(i-1) < 0 < # < a < b1 < b2 < b3 < 1`.
pub fn sigma_order(level: usize) -> AlphabetOrder {
    let mut letters = vec![DOLLAR.to_string()];
    letters.extend((1..level).map(dollar_n));
    letters.extend(["0", "#", "a", "b1", "b2", "b3", "1"].map(String::from));
    AlphabetOrder::new(letters).expect("distinct letters")
}

/// The smallest `Σ_i` order covering the letters of `a`.
pub fn sigma_order_for(a: &Nfa) -> Result<AlphabetOrder> {
    let mut level = 1;
    for s in a.alphabet() {
        let name = crate::compose::name_of(s);
        if let Some(j) = name.strip_prefix(DOLLAR).filter(|r| !r.is_empty()) {
            let j: usize = j.parse().map_err(|_| Error::UnknownLetter(name.clone()))?;
            level = level.max(j + 1);
        }
    }
    let ord = sigma_order(level);
    for s in a.alphabet() {
        let name = crate::compose::name_of(s);
        if ord.rank(&name).is_none() {
            return Err(Error::UnknownLetter(name));
        }
    }
    Ok(ord)
}
