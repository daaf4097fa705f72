pub mod compare;
pub mod discover;
pub mod dump;
pub mod evaluate;
pub mod sweep;
pub mod synth;
