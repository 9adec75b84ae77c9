pub mod control;
pub mod drift;
pub mod ergodic;
pub mod mdp;
pub mod simulate;
pub mod validate;
