pub mod circuit;
pub mod diagram;
pub mod lexicon;
pub mod parser;
pub mod pregroup;
pub mod semantics;
