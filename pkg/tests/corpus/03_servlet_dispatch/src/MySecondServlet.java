@WebServlet("/MySecondServlet")
public class MySecondServlet extends HttpServlet {
	...
}
