from __future__ import annotations

from phage_opt._main import main

if __name__ == '__main__':
    raise SystemExit(main())
