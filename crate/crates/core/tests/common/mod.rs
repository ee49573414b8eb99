pub mod smf;
