pub mod field;
pub mod index_set;
pub mod matrix;
pub mod poly;
