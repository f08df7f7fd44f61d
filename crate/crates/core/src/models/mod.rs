//! The compact models: points, characters, pairings and metrics.

mod character;
mod element;
mod metric;
mod sequence;

pub use character::{pair, pair_sequence, CharSequence, Character, Pairing, MAX_PADIC_DIGITS};
pub use element::{encode_torus, Element, Model, TailRule};
pub use metric::{distance_bounds, metric_d, rho, DEFAULT_HORIZON};
pub use sequence::{BaseSequence, IndexRule};

pub(crate) use element::floor_times;
pub(crate) use sequence::{is_prime, SEARCH_LIMIT};
