from hebbian_tmaze.cli import main

raise SystemExit(main())
