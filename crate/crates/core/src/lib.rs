pub mod chartable;
pub mod classfn;
pub mod cyclo;
pub mod error;
pub mod modular;
pub mod periods;
pub mod field;
pub mod basechange;
pub mod bz;
pub mod cache;
pub mod gelfand_graev;
pub mod matgroup;
pub mod report;
pub mod setting;
pub mod suites;
