from mfas_cover.cli import main

raise SystemExit(main())
