// Browser entry point: mounts the app onto #app using the page origin (or
// ?api=... override) as the service base url.

import { Client } from "./api.js";
import { defaultApiBase, mountApp } from "./main.js";

const root = document.getElementById("app");
if (root) {
  const base = defaultApiBase(window.location);
  mountApp(root, new Client(base), window.localStorage);
}
