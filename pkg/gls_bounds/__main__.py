from gls_bounds.cli import main

raise SystemExit(main())
