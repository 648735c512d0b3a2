pub mod asympt;
pub mod combinat;
pub mod cyclo;
pub mod error;
pub mod hofstadter;
pub mod moments;
pub mod numeric;
pub mod ring;
pub mod series;
pub mod spectrum;
pub mod walks;
