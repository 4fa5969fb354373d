pub mod inspect;
pub mod prepare;
pub mod run;
pub mod synth;
