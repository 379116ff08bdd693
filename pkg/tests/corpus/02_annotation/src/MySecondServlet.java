// More than one URL patterns
@WebServlet(urlPatterns = {"/myHTMLPage.html", "/myJSPPage.jsp", "/myJSFPage.xhtml"})
public class MySecondServlet extends HttpServlet{
	...
}
