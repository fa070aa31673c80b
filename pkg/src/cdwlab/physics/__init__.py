"""Physics of the false-vacuum tunneling model of CDW transport."""
