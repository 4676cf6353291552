pub mod exact_riemann;
