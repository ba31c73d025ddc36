"""RF truth tables and configuration assignment."""
