pub mod condense;
pub mod endo;
pub mod gfmat;
pub mod oracle;
pub mod orbits;
pub mod permgrp;
pub mod reference;
pub mod rep;
pub mod scenario;
