// Entry point: reads the service base URL from <meta name="api-base">,
// mounts the router on #app.

import { ApiClient } from "./api.js";
import { Router } from "./router.js";

const meta = document.querySelector('meta[name="api-base"]') as HTMLMetaElement | null;
const base = meta?.content ?? "";
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
new Router(root, new ApiClient(base)).start();
