import { App } from "./app";

const params = new URLSearchParams(window.location.search);
const root = document.getElementById("app");
if (root) {
  const app = new App(root, {
    baseUrl: params.get("api") ?? "",
    tickIntervalMs: 5000,
  });
  void app.init();
}
