pub mod audit;
pub mod cli;
pub mod field;
pub mod linalg;
pub mod localdecode;
pub mod mpoly;
pub mod multcode;
pub mod packing;
pub mod pir;
pub mod sizing;
pub mod store;
pub mod transport;
pub mod unidecode;
