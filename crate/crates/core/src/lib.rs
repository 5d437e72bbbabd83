pub mod classify;
pub mod forms;
pub mod modring;
pub mod pauli;
pub mod qca;
pub mod random;
pub mod selftest;
pub mod symplectic;
