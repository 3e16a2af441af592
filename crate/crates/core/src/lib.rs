pub mod level;
pub mod sim;
pub mod oracle;
pub mod cnf;
pub mod encoder;
pub mod driver;
pub mod pddl;
pub mod bench;
pub mod corpus;
