pub mod boolean;
pub mod contract;
pub mod distribution;
pub mod eps;
pub mod io;
pub mod network;
pub mod oracle;
pub mod synthesis;
