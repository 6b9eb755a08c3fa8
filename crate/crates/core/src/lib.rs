pub mod bigo;
pub mod colombeau;
pub mod exec;
pub mod index;
pub mod jet;
pub mod quadrature;
pub mod testfn;
