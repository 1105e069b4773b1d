//! Engine, solver and certification harness for the polynomial coefficient
//! game: Nora and Wanda alternately fix coefficients of a degree-d
//! polynomial, and Wanda wins iff the result has a root in the arena.

pub mod abelian;
pub mod error;
pub mod game;
pub mod solver;
pub mod strategy;
pub mod valued;
pub mod verify;
pub mod zring;

pub use error::{Error, Result};
pub use game::{Arena, Coeff, GameState, Move, Player};
