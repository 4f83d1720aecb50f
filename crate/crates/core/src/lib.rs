pub mod io;
pub mod lp;
pub mod model;
pub mod polycone;
pub mod sets;
pub mod solver;
pub mod stationarity;
pub mod vecops;
