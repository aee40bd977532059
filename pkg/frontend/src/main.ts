/** Page bootstrap: mount the app against the same-origin service. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const app = new App(document, new ApiClient("", (url, init) => fetch(url, init)));
void app.mount();
