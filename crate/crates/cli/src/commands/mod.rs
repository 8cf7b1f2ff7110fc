pub mod decay_fit;
pub mod gen_data;
pub mod run;
pub mod verify;
